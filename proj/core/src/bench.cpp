#include "normspec/bench.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <sstream>

namespace normspec {

namespace {

const char* kChainSpec = R"(Fact x Identified by int Derived from
  (Foreach x: x(x.int - 1) Where 0 < x.int).
)";

const char* kArithSpec = R"(Fact x Identified by Int Derived from
  (Foreach x1, x2: x((x1 + x2) / 2)).
)";

const char* kComboSpec = R"(Fact x Identified by Int Derived from
  (Foreach y: y.x1), (Foreach y: y.x2),
  (Foreach y: y.x3), (Foreach x: x(x - 1) Where 0 < x)
Fact y Identified by x1 * x2 * x3 Derived from
  (Foreach x: y(x,x,x)),
  (Foreach x1, x2, x3: y(x1,x2,x3)
                Where (x1 == x2 || x2 != x3)
                   && (Exists y: x2 < y.x1)).
)";

const char* kPrimesSpec = R"(Fact prime Identified by Int
  Derived from (Foreach int: prime(int)
    Where Not(Exists int1, int2: 1 Where int1 * int2 == int)).
Event addleq Related to int Creates int
  Syncs with addleq(int - 1) Where 2 < int.
)";

struct Suite {
    std::string name;
    std::string spec;
    std::string (*scenario)(int n);
    void (*check)(const Session& session, int n);
};

std::string scnChain(int n) { return "+x(" + std::to_string(n) + ").\n"; }
std::string scnArith(int n) { return "+x(0). +x(" + std::to_string(n) + ").\n"; }
std::string scnCombo(int n) { return "+x(" + std::to_string(n) + ").\n"; }
std::string scnLong(int n) {
    std::string out;
    for (int i = 0; i < n; ++i) out += "+x(4). ";
    out += "\n";
    return out.empty() ? "\n" : out;
}
std::string scnPrimes(int n) { return "addleq(" + std::to_string(n) + ").\n"; }

size_t heldCount(const Session& session, const std::string& type) {
    const State& s = session.head();
    return s.kb.heldOfType(*s.registry, type).size();
}

void expect(bool cond, const std::string& msg) {
    if (!cond) throw CorrectnessFailure(msg);
}

void checkChain(const Session& session, int n) {
    expect(heldCount(session, "x") == static_cast<size_t>(n + 1),
           "chain: expected " + std::to_string(n + 1) + " instances of x");
}

void checkArith(const Session& session, int n) {
    size_t want = n == 0 ? 1 : static_cast<size_t>(n + 1);
    expect(heldCount(session, "x") == want,
           "arith: expected " + std::to_string(want) + " instances of x");
}

void checkCombo(const Session& session, int n) {
    expect(heldCount(session, "x") == static_cast<size_t>(n + 1), "combo: wrong x count");
    const State& s = session.head();
    Instance xi("x", {Value(Literal(static_cast<int64_t>(n)))});
    Instance diag("y", {Value(xi), Value(xi), Value(xi)});
    expect(s.kb.truthOf(*s.registry, diag) == Truth::True, "combo: diagonal triple missing");
}

void checkLong(const Session& session, int n) {
    (void)n;
    expect(heldCount(session, "x") == 5, "long: expected x 0..4");
}

std::vector<int64_t> sieve(int n) {
    std::vector<bool> composite(static_cast<size_t>(n) + 1, false);
    std::vector<int64_t> primes;
    for (int64_t p = 2; p <= n; ++p) {
        if (composite[static_cast<size_t>(p)]) continue;
        primes.push_back(p);
        for (int64_t q = p * p; q <= n; q += p) composite[static_cast<size_t>(q)] = true;
    }
    return primes;
}

void checkPrimes(const Session& session, int n) {
    const State& s = session.head();
    std::vector<int64_t> got;
    for (const Instance& inst : s.kb.heldOfType(*s.registry, "prime"))
        got.push_back(inst.args.at(0).literal().num());
    std::vector<int64_t> want = sieve(n);
    expect(got == want, "primes: derived set does not match the sieve");
}

const std::vector<Suite>& suites() {
    static const std::vector<Suite> all = {
        {"chain", kChainSpec, scnChain, checkChain},
        {"arith", kArithSpec, scnArith, checkArith},
        {"combo", kComboSpec, scnCombo, checkCombo},
        {"long", kComboSpec, scnLong, checkLong},
        {"primes", kPrimesSpec, scnPrimes, checkPrimes},
    };
    return all;
}

double runOnce(const Suite& suite, int n, const SemanticsOptions& opts, bool check) {
    auto start = std::chrono::steady_clock::now();
    Session session(opts);
    session.executeText(suite.spec);
    session.executeText(suite.scenario(n));
    auto end = std::chrono::steady_clock::now();
    if (check) suite.check(session, n);
    return std::chrono::duration<double, std::milli>(end - start).count();
}

} // namespace

const std::vector<std::string>& bench_suites() {
    static const std::vector<std::string> names = {"chain", "arith", "combo", "long", "primes"};
    return names;
}

std::vector<BenchRow> bench_run(const std::string& suiteName, const std::vector<int>& sizes,
                                int runs, const SemanticsOptions& opts) {
    const Suite* suite = nullptr;
    for (const Suite& s : suites())
        if (s.name == suiteName) suite = &s;
    if (!suite) throw Error("unknown bench suite '" + suiteName + "'");

    std::vector<BenchRow> rows;
    for (int n : sizes) {
        runOnce(*suite, n, opts, /*check=*/true); // correctness gate, untimed
        std::vector<double> times;
        for (int i = 0; i < runs; ++i) times.push_back(runOnce(*suite, n, opts, false));
        std::sort(times.begin(), times.end());
        double median = times.size() % 2 == 1
                            ? times[times.size() / 2]
                            : 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
        rows.push_back(BenchRow{suiteName, n, median, runs});
    }
    return rows;
}

void bench_write_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
    out << "suite,n,median_ms,runs\n";
    for (const BenchRow& r : rows) {
        std::ostringstream ms;
        ms.precision(3);
        ms << std::fixed << r.medianMs;
        out << r.suite << "," << r.n << "," << ms.str() << "," << r.runs << "\n";
    }
}

} // namespace normspec
