#pragma once

#include <string>

#include "aclab/statevector.hpp"

namespace aclab {

// Shortest round-trip decimal form (std::to_chars); parse-then-write of a file
// produced here is byte-identical.
std::string format_double(double v);
double parse_double(const std::string& s);

// CSV with a single `omega` header line plus a JSON sidecar `<path>.meta.json`
// carrying the spec digest, sampling mode, seed, realization count and the
// sha256 of the CSV bytes.
void save_sample_set(const OverlapSampleSet& set, const std::string& csv_path);
OverlapSampleSet load_sample_set(const std::string& csv_path);

std::string sample_set_content_hash(const OverlapSampleSet& set);

}  // namespace aclab
