#include "clup/records.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace clup {

const char* record_kind_name(RecordKind k)
{
    switch (k) {
    case RecordKind::Prediction: return "prediction";
    case RecordKind::Simulation: return "simulation";
    case RecordKind::Stationary: return "stationary";
    case RecordKind::Scan: return "scan";
    case RecordKind::FirstIter: return "first_iter";
    case RecordKind::Ml: return "ml";
    }
    return "unknown";
}

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

std::string records_to_csv(const std::string& command, const Provenance& prov,
                           const std::vector<ResultRecord>& records)
{
    std::string s = "# clup-csv v1, command=" + command + ", build=" + prov.build +
                    ", seed=" + std::to_string(prov.seed) + "\n";
    if (records.empty())
        return s;
    // fixed column order from the first record (uniform within a command)
    s += "kind";
    for (const auto& [k, v] : records.front().inputs)
        s += "," + k;
    for (const auto& [k, v] : records.front().outputs)
        s += "," + k;
    s += ",ok\n";
    for (const auto& r : records) {
        s += record_kind_name(r.kind);
        for (const auto& [k, v] : r.inputs)
            s += "," + fmt(v);
        for (const auto& [k, v] : r.outputs)
            s += "," + fmt(v);
        s += r.ok ? ",1" : ",0";
        s += "\n";
    }
    return s;
}

std::string records_to_json(const std::string& command, const Provenance& prov,
                            const std::vector<ResultRecord>& records)
{
    nlohmann::json out;
    out["command"] = command;
    out["provenance"] = {{"build", prov.build}, {"seed", prov.seed}};
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json row;
        row["kind"] = record_kind_name(r.kind);
        for (const auto& [k, v] : r.inputs)
            row["inputs"][k] = v;
        for (const auto& [k, v] : r.outputs)
            row["outputs"][k] = v;
        row["ok"] = r.ok;
        if (!r.note.empty())
            row["note"] = r.note;
        rows.push_back(row);
    }
    out["records"] = rows;
    return out.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open output file: " + path);
    f << contents;
}

} // namespace clup
