#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace radial::verify {

// pass / fail for asserted inequalities; measured for "there exists C"
// statements where the artifact can only report the constant it found.
enum class Verdict { pass, fail, measured };

std::string to_string(Verdict v);

struct Claim {
    int criterion;
    std::string anchor;     // stable descriptive key, e.g. "warped-curvature/oracle-agreement"
    std::string statement;  // what was checked
    Verdict verdict;
    double value;       // the measured number the verdict rests on
    std::string bound;  // the tolerance it was held to, as text
    std::string note;
};

struct Options {
    std::uint64_t seed = 20240611;
    int threads = 1;
};

constexpr int kCriteria = 12;  // 13 is the determinism of verify-all itself

std::vector<Claim> run_criterion(int k, const Options& opt);

// Criteria 1..kCriteria; the result order is fixed whatever the thread count.
std::vector<Claim> run_all(const Options& opt);

}  // namespace radial::verify
