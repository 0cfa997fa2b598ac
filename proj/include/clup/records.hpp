#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace clup {

enum class RecordKind { Prediction, Simulation, Stationary, Scan, FirstIter, Ml };

const char* record_kind_name(RecordKind k);

// One self-describing result row: echoed inputs plus named outputs, both in a
// fixed order so re-runs are byte-identical.
struct ResultRecord {
    RecordKind kind = RecordKind::Prediction;
    std::vector<std::pair<std::string, double>> inputs;
    std::vector<std::pair<std::string, double>> outputs;
    bool ok = true;
    std::string note;  // failure text when !ok
};

struct Provenance {
    std::string build;       // git describe of the producing binary
    std::uint64_t seed = 0;  // campaign seed
};

// header comment carries the schema version, command echo, and provenance;
// no timestamps so identical runs produce identical bytes
std::string records_to_csv(const std::string& command, const Provenance& prov,
                           const std::vector<ResultRecord>& records);
std::string records_to_json(const std::string& command, const Provenance& prov,
                            const std::vector<ResultRecord>& records);

void write_file(const std::string& path, const std::string& contents);

} // namespace clup
