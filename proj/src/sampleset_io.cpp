#include "aclab/sampleset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aclab/errors.hpp"
#include "aclab/sha256.hpp"

namespace aclab {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw config_error("malformed floating-point value: '" + s + "'");
    return v;
}

namespace {

std::string render_csv(const OverlapSampleSet& set) {
    std::string out = "omega\n";
    for (double w : set.samples) {
        out += format_double(w);
        out += '\n';
    }
    return out;
}

}  // namespace

std::string sample_set_content_hash(const OverlapSampleSet& set) {
    return sha256_hex(render_csv(set));
}

void save_sample_set(const OverlapSampleSet& set, const std::string& csv_path) {
    const std::string csv = render_csv(set);
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw config_error("cannot write " + csv_path);
        out << csv;
    }
    nlohmann::json meta;
    meta["schema"] = 1;
    meta["spec_digest"] = set.meta.spec_digest;
    meta["mode"] = set.meta.mode;
    meta["seed"] = set.meta.seed;
    meta["realizations"] = set.meta.realizations;
    meta["count"] = set.samples.size();
    meta["content_hash"] = sha256_hex(csv);
    std::ofstream mout(csv_path + ".meta.json", std::ios::binary);
    if (!mout) throw config_error("cannot write " + csv_path + ".meta.json");
    mout << meta.dump(2) << "\n";
}

OverlapSampleSet load_sample_set(const std::string& csv_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw config_error("cannot read " + csv_path);
    std::string line;
    if (!std::getline(in, line) || line != "omega")
        throw config_error(csv_path + ": expected an 'omega' header row");
    OverlapSampleSet set;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        set.samples.push_back(parse_double(line));
    }
    std::ifstream min(csv_path + ".meta.json", std::ios::binary);
    if (min) {
        nlohmann::json meta = nlohmann::json::parse(min, nullptr, true);
        set.meta.spec_digest = meta.value("spec_digest", "");
        set.meta.mode = meta.value("mode", "");
        set.meta.seed = meta.value("seed", std::uint64_t{0});
        set.meta.realizations = meta.value("realizations", std::uint64_t{1});
        if (meta.contains("count") &&
            meta["count"].get<std::size_t>() != set.samples.size())
            throw config_error(csv_path + ": sample count disagrees with the sidecar metadata");
    }
    return set;
}

}  // namespace aclab
