#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "normspec/session.hpp"

namespace normspec {

// Desk-scale timing harness. Each (suite, n) runs `runs` times and reports
// the median wall time; a correctness side-condition is checked before any
// timing is accepted (chain instance counts, the prime set, and so on).
struct BenchRow {
    std::string suite;
    int n = 0;
    double medianMs = 0.0;
    int runs = 0;
};

struct CorrectnessFailure : Error {
    using Error::Error;
};

const std::vector<std::string>& bench_suites(); // chain, arith, combo, long, primes

std::vector<BenchRow> bench_run(const std::string& suite, const std::vector<int>& sizes,
                                int runs, const SemanticsOptions& opts);

// CSV columns: suite,n,median_ms,runs
void bench_write_csv(const std::vector<BenchRow>& rows, std::ostream& out);

} // namespace normspec
