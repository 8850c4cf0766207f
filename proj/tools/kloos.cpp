// Command-line front end: sum, count, vaughan, sweep, solve, bounds.
//
// Exit codes: 0 success, 2 precondition violation, 3 internal inconsistency
// (including --check oracle mismatches), 64 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kloos/kloos.hpp"

using namespace kloos;

namespace {

constexpr int kExitPrecondition = 2;
constexpr int kExitInconsistent = 3;
constexpr int kExitUsage = 64;

struct Config {
  std::string kind;
  i64 q = 0;
  i64 a = 1;
  i64 b = 1;
  i64 A = 0;
  i64 m = 1;
  u64 X = 0;
  u64 N = 0;
  u64 N1 = 0;
  u64 M = 0;
  int k = 3;
  double V = NAN;
  double Xr = 0;
  std::string grid;
  std::string P = "0,1";
  std::string Q = "1";
  std::string weight = "mangoldt";
  double epsilon = kDefaultEpsilon;
  std::string format = "json";
  std::string output;
  u64 limit = 0;
  bool check = false;
};

struct Output {
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;
};

std::string num(double x) { return detail::fmt17(x); }

std::vector<i64> parse_int_list(const std::string& s) {
  std::vector<i64> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw domain_error("bad integer list entry '" + item + "'");
    }
  }
  if (out.empty()) throw domain_error("empty integer list");
  return out;
}

/// `geometric:lo:hi:points` or a comma-separated list.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  auto to_d = [](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw domain_error("bad grid value '" + s + "'");
    }
  };
  if (spec.rfind("geometric:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(spec.substr(10));
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw domain_error("grid must be geometric:lo:hi:points");
    const double lo = to_d(parts[0]), hi = to_d(parts[1]);
    const double pts = to_d(parts[2]);
    if (!(lo > 0 && hi >= lo && pts >= 1 && pts == std::floor(pts))) {
      throw domain_error("grid needs 0 < lo <= hi and an integer point count >= 1");
    }
    const int n = static_cast<int>(pts);
    for (int i = 0; i < n; ++i) {
      out.push_back(n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1)));
    }
    return out;
  }
  if (spec.empty()) return out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_d(item));
  return out;
}

u64 table_limit(const Config& c, u64 needed) {
  const u64 lim = c.limit ? c.limit : std::max<u64>(needed, 2);
  if (lim < needed) {
    throw domain_error("--limit " + std::to_string(lim) + " is below the required " + std::to_string(needed));
  }
  if (lim > kMaxSieveLimit) throw domain_error("required table limit exceeds 10^8");
  return lim;
}

Params base_params(const Config& c) {
  return {{"q", std::to_string(c.q)}, {"a", std::to_string(c.a)}, {"b", std::to_string(c.b)}};
}

void inconsistent_if(bool bad, const std::string& what) {
  if (bad) throw inconsistency(what);
}

// Direct evaluation with one modular inverse per term, for --check.
template <typename W>
std::complex<double> direct_sum(const Modulus& q, u64 a, u64 b, u64 lo, u64 hi, W&& w) {
  std::complex<long double> s = 0;
  const u64 m = q.value();
  for (u64 n = lo; n <= hi; ++n) {
    const double wn = w(n);
    if (wn == 0.0 || gcd(n % m, m) != 1) continue;
    const u64 inv = modinv(static_cast<i64>(n % m), q).value();
    const auto z = unit_root(addmod(mulmod(a, inv, m), mulmod(b, n % m, m), m), m);
    s += std::complex<long double>(wn * z.real(), wn * z.imag());
  }
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

void check_close(const ComplexSum& s, std::complex<double> want) {
  const double tol = s.err + 1e-12 * (1.0 + static_cast<double>(s.terms));
  inconsistent_if(std::abs(s.value() - want) > tol + 1e-9 * std::abs(want),
                  "oracle mismatch: fast " + num(s.re) + "+" + num(s.im) + "i, direct " + num(want.real()) +
                      "+" + num(want.imag()) + "i");
}

Output run_sum(const Config& c) {
  const Modulus q = factorize(c.q);
  const Residue a(c.a, q), b(c.b, q);
  Params p = base_params(c);
  p.emplace_back("kind", c.kind);
  const KloostermanContext ctx(q);
  auto units = [&](const SumSpec& s) { detail::require_units(s, "sum"); };
  if (c.kind == "complete") {
    const auto s = complete_sum(ctx, a, b);
    if (c.check) check_close(s, direct_sum(q, a.value(), b.value(), 1, q.value(), [](u64) { return 1.0; }));
    return {{to_row(s, "complete", p)}, {}};
  }
  if (c.kind == "incomplete") {
    p.emplace_back("N", std::to_string(c.N));
    const auto s = incomplete_sum(ctx, a, b, c.N);
    if (c.check) check_close(s, direct_sum(q, a.value(), b.value(), 1, c.N, [](u64) { return 1.0; }));
    return {{to_row(s, "incomplete", p)}, {}};
  }
  if (c.kind == "integer") {
    p.emplace_back("X", std::to_string(c.X));
    const auto s = integer_sum(ctx, SumSpec{q, a, b, c.X, Weight::unit_over_integers});
    if (c.check) check_close(s, direct_sum(q, a.value(), b.value(), 1, c.X, [](u64) { return 1.0; }));
    return {{to_row(s, "integer", p)}, {}};
  }
  if (c.kind == "prime" || c.kind == "lambda") {
    const Weight w = c.kind == "prime" ? Weight::unit_over_primes : Weight::mangoldt;
    const SumSpec spec{q, a, b, c.X, w};
    units(spec);
    p.emplace_back("X", std::to_string(c.X));
    const PrimeTable t = sieve(table_limit(c, c.X));
    const auto s = weighted_sum(ctx, spec, t);
    if (c.check) {
      check_close(s, direct_sum(q, a.value(), b.value(), 2, c.X, [&](u64 n) {
                    if (w == Weight::mangoldt) return t.mangoldt(n);
                    return is_prime(n) ? 1.0 : 0.0;
                  }));
    }
    return {{to_row(s, c.kind, p)}, {}};
  }
  if (c.kind == "rational") {
    const auto P = parse_int_list(c.P), Q = parse_int_list(c.Q);
    p = {{"q", std::to_string(c.q)}, {"X", std::to_string(c.X)}, {"P", c.P}, {"Q", c.Q}};
    const PrimeTable t = sieve(table_limit(c, c.X));
    const auto r = rational_sum(P, Q, q, c.X, t);
    p.emplace_back("skipped", std::to_string(r.skipped));
    return {{to_row(r.sum, "rational", p)}, {}};
  }
  throw domain_error("unknown --kind '" + c.kind + "' for sum (complete|incomplete|prime|lambda|integer|rational)");
}

Output run_count(const Config& c) {
  const Modulus q = factorize(c.q);
  Params p{{"q", std::to_string(c.q)}, {"kind", c.kind}};
  auto brute_limit = [&](u64 lim) {
    if (c.check && q.value() > lim) throw domain_error("--check needs q <= " + std::to_string(lim));
  };
  auto compare = [&](const CountResult& fast, const CountResult& slow) {
    inconsistent_if(fast.value != slow.value, "oracle mismatch: fast " + std::to_string(fast.value) +
                                                  ", brute " + std::to_string(slow.value));
  };
  CountResult r;
  if (c.kind == "nu") {
    p.emplace_back("A", std::to_string(c.A));
    r = nu(q, c.A);
    if (c.check) brute_limit(100000), compare(r, nu_brute(q, c.A));
  } else if (c.kind == "mu") {
    p.emplace_back("a", std::to_string(c.a));
    r = mu_count(q, c.a);
    if (c.check) brute_limit(100000), compare(r, mu_count_brute(q, c.a));
  } else if (c.kind == "e2") {
    r = {e_roots(2, q.value()), std::numeric_limits<double>::infinity(), CountMethod::multiplicative};
    if (c.check) brute_limit(10000000), compare(r, {e_roots_brute(2, q.value())});
  } else if (c.kind == "kappa") {
    p.emplace_back("a", std::to_string(c.a));
    p.emplace_back("b", std::to_string(c.b));
    r = kappa(q, Residue(c.a, q), Residue(c.b, q));
    if (c.check) brute_limit(10000), compare(r, kappa_brute(q, Residue(c.a, q), Residue(c.b, q)));
  } else if (c.kind == "I") {
    p.emplace_back("N", std::to_string(c.N));
    p.emplace_back("N1", std::to_string(c.N1));
    r = count_I(q, c.N, c.N1);
    if (c.check) {
      if (c.N1 - c.N > 30) throw domain_error("--check needs N1 - N <= 30");
      compare(r, count_I_brute(q, c.N, c.N1));
    }
  } else if (c.kind == "J") {
    p.emplace_back("M", std::to_string(c.M));
    p.emplace_back("epsilon", num(c.epsilon));
    r = count_J(q, c.M, c.epsilon);
    if (c.check) {
      if (c.M > 30) throw domain_error("--check needs M <= 30");
      compare(r, count_J_brute(q, c.M, c.epsilon));
    }
  } else {
    throw domain_error("unknown --kind '" + c.kind + "' for count (nu|mu|e2|kappa|I|J)");
  }
  Output out{{to_row(r, p)}, {}};
  if (!r.within_bound()) out.notes.push_back("bound violated");
  return out;
}

Output run_vaughan(const Config& c) {
  const Modulus q = factorize(c.q);
  const SumSpec spec{q, Residue(c.a, q), Residue(c.b, q), c.X, Weight::mangoldt};
  detail::require_units(spec, "vaughan");
  const bool manual = !std::isnan(c.V);
  const VaughanParams params = manual ? VaughanParams{c.V, 0.0, Regime::manual}
                                   : choose_params(q, static_cast<double>(c.X));
  if (manual) detail::check_params(params, c.X, q.value());
  const PrimeTable t = sieve(table_limit(c, c.X));
  Params p = base_params(c);
  p.emplace_back("X", std::to_string(c.X));
  const Decomposition d = decompose(spec, params, t);
  Output out{to_rows(d, p), {}};
  const ComplexSum support = remainder_on_support(spec, params, t);
  Params sp = p;
  sp.emplace_back("V", num(params.V));
  out.rows.push_back(to_row(support, "remainder-support", sp));
  if (c.check) {
    inconsistent_if(std::abs(d.remainder.value() - support.value()) > d.remainder.err + support.err,
                    "remainder differs from its support formula");
  }
  return out;
}

Output run_sweep(const Config& c) {
  const Modulus q = factorize(c.q);
  const Residue a(c.a, q), b(c.b, q);
  if (gcd(mulmod(a.value(), b.value(), q.value()), q.value()) != 1) {
    throw domain_error("sweep: gcd(ab, q) != 1");
  }
  const std::vector<double> grid = parse_grid(c.grid);
  const double qd = static_cast<double>(q.value());
  u64 needed = 2;
  for (double x : grid) {
    if (x <= std::pow(qd / 2, 1.5) * (1 + 1e-12)) needed = std::max<u64>(needed, static_cast<u64>(x));
  }
  const u64 lim = c.limit ? c.limit : std::min<u64>(needed, kMaxSieveLimit);
  const PrimeTable t = sieve(std::max<u64>(lim, 2));
  const BoundReport rep = sweep_T(q, grid, a, b, t, c.epsilon);
  return {rep.rows, rep.notes};
}

Output run_solve(const Config& c) {
  const Modulus q = factorize(c.q);
  const Residue m(c.m, q);
  Params p{{"q", std::to_string(c.q)}, {"m", std::to_string(m.value())}, {"N", std::to_string(c.N)}};
  Output out;
  if (c.kind == "theorem2") {
    if (!q.is_prime()) throw domain_error("solve theorem2: q must be prime");
    const PrimeTable t = sieve(table_limit(c, 2 * c.N));
    const auto r = count_theorem2(q, m, c.N, t);
    const auto w = find_witness_theorem2(q, m, c.N, t);
    p.emplace_back("pi1", std::to_string(r.pi1));
    p.emplace_back("main_term", num(r.main_term));
    p.emplace_back("R", num(r.remainder));
    p.emplace_back("delta", num(r.delta));
    if (r.brute) p.emplace_back("brute", std::to_string(*r.brute));
    if (w) p.emplace_back("witness", std::to_string(w->primes[0]) + " " + std::to_string(w->primes[1]) + " " +
                                         std::to_string(w->primes[2]));
    CountResult cr{r.count, std::numeric_limits<double>::infinity(), CountMethod::hashed};
    ReportRow row = to_row(cr, p);
    row.method = "convolution";
    row.bound = r.main_term;
    row.ratio = r.main_term > 0 ? static_cast<double>(r.count) / r.main_term : NAN;
    out.rows.push_back(row);
    return out;
  }
  if (c.kind == "theorem3") {
    const Residue a(c.a, q), b(c.b, q);
    const PrimeTable t = sieve(table_limit(c, c.N));
    const auto r = count_theorem3(q, a, b, c.k, m, c.N, t);
    const auto w = find_witness_theorem3(q, a, b, c.k, m, c.N, t);
    p.emplace_back("a", std::to_string(a.value()));
    p.emplace_back("b", std::to_string(b.value()));
    p.emplace_back("k", std::to_string(c.k));
    p.emplace_back("pi_star", std::to_string(r.pi_star));
    p.emplace_back("main_term", num(r.main_term));
    p.emplace_back("delta", num(r.delta));
    p.emplace_back("main_term_applies", r.main_term_applies ? "true" : "false");
    if (r.brute) p.emplace_back("brute", std::to_string(*r.brute));
    if (w) {
      std::string s;
      for (u64 x : w->primes) s += (s.empty() ? "" : " ") + std::to_string(x);
      p.emplace_back("witness", s);
    }
    CountResult cr{r.count, std::numeric_limits<double>::infinity(), CountMethod::hashed};
    ReportRow row = to_row(cr, p);
    row.method = "convolution";
    row.bound = r.main_term;
    row.ratio = r.main_term > 0 ? static_cast<double>(r.count) / r.main_term : NAN;
    out.rows.push_back(row);
    return out;
  }
  throw domain_error("unknown --kind '" + c.kind + "' for solve (theorem2|theorem3)");
}

Output run_bounds(const Config& c) {
  ReportRow row;
  row.bound = NAN;
  row.ratio = NAN;
  row.method = c.kind;
  if (c.kind == "ck3" || c.kind == "ck4") {
    const Rational r = c.kind == "ck3" ? ck_theorem3(c.k) : ck_theorem4(c.k);
    row.value_re = r.value();
    row.params = {{"k", std::to_string(c.k)}, {"rational", r.str()}};
  } else if (c.kind == "delta") {
    const Modulus q = factorize(c.q);
    row.value_re = delta_theorem1(q, c.Xr);
    row.params = {{"q", std::to_string(c.q)}, {"X", num(c.Xr)}};
  } else if (c.kind == "params") {
    const Modulus q = factorize(c.q);
    const VaughanParams vp = choose_params(q, c.Xr);
    row.value_re = vp.V;
    row.params = {{"q", std::to_string(c.q)}, {"X", num(c.Xr)}, {"V", num(vp.V)}, {"D", num(vp.D)},
                  {"regime", to_string(vp.regime)}};
  } else {
    throw domain_error("unknown --kind '" + c.kind + "' for bounds (ck3|ck4|delta|params)");
  }
  return {{row}, {}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kloosterman sums over primes: exact sums, congruence counts and bound checks"};
  app.require_subcommand(1, 1);
  Config c;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output", c.output, "output file (default stdout)");
  };
  auto modulus = [&](CLI::App* sub) { sub->add_option("--q", c.q, "modulus")->required(); };
  auto coeffs = [&](CLI::App* sub) {
    sub->add_option("--a", c.a, "coefficient a");
    sub->add_option("--b", c.b, "coefficient b");
  };
  auto limit = [&](CLI::App* sub) { sub->add_option("--limit", c.limit, "sieve table limit"); };

  auto* sum = app.add_subcommand("sum", "evaluate an exponential sum");
  sum->add_option("--kind", c.kind, "complete|incomplete|prime|lambda|integer|rational");
  modulus(sum), coeffs(sum), limit(sum), common(sum);
  sum->add_option("--X", c.X, "range limit");
  sum->add_option("--N", c.N, "incomplete sum length");
  sum->add_option("--P", c.P, "numerator coefficients, constant first");
  sum->add_option("--Q", c.Q, "denominator coefficients, constant first");
  sum->add_option("--weight", c.weight, "used when --kind is omitted")
      ->check(CLI::IsMember({"mangoldt", "unit-over-primes", "unit-over-integers"}));
  sum->add_flag("--check", c.check, "compare against direct evaluation");

  auto* count = app.add_subcommand("count", "count congruence solutions");
  count->add_option("--kind", c.kind, "nu|mu|e2|kappa|I|J")->required();
  modulus(count), coeffs(count), common(count);
  count->add_option("--A", c.A, "right-hand side for nu");
  count->add_option("--N", c.N, "lower end for I");
  count->add_option("--N1", c.N1, "upper end for I");
  count->add_option("--M", c.M, "range parameter for J");
  count->add_option("--epsilon", c.epsilon, "envelope exponent for J");
  count->add_flag("--check", c.check, "compare against brute force");

  auto* vaughan = app.add_subcommand("vaughan", "decompose T_q(X) with Vaughan's identity");
  modulus(vaughan), coeffs(vaughan), limit(vaughan), common(vaughan);
  vaughan->add_option("--X", c.X, "range limit")->required();
  vaughan->add_option("--V", c.V, "cutoff (default: chosen from q and X)");
  vaughan->add_flag("--check", c.check, "compare remainder with its support formula");

  auto* sweep = app.add_subcommand("sweep", "bound ratios for T_q(X) over an X grid");
  modulus(sweep), coeffs(sweep), limit(sweep), common(sweep);
  sweep->add_option("--grid", c.grid, "geometric:lo:hi:points or comma list")->required();
  sweep->add_option("--epsilon", c.epsilon, "exponent in the reference X q^eps Delta");

  auto* solve = app.add_subcommand("solve", "prime congruence experiments");
  solve->add_option("--kind", c.kind, "theorem2|theorem3")->required();
  modulus(solve), coeffs(solve), limit(solve), common(solve);
  solve->add_option("--m", c.m, "target residue");
  solve->add_option("--N", c.N, "prime range parameter")->required();
  solve->add_option("--k", c.k, "number of primes (theorem3)");

  auto* bounds = app.add_subcommand("bounds", "closed-form exponents and parameters");
  bounds->add_option("--kind", c.kind, "ck3|ck4|delta|params")->required();
  bounds->add_option("--k", c.k, "k for thresholds");
  bounds->add_option("--q", c.q, "modulus");
  bounds->add_option("--X", c.Xr, "range limit");
  common(bounds);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  Output out;
  std::string command;
  try {
    if (sum->parsed()) {
      command = "sum";
      if (c.kind.empty()) {
        c.kind = c.weight == "mangoldt" ? "lambda" : c.weight == "unit-over-primes" ? "prime" : "integer";
      }
      out = run_sum(c);
    } else if (count->parsed()) {
      command = "count", out = run_count(c);
    } else if (vaughan->parsed()) {
      command = "vaughan", out = run_vaughan(c);
    } else if (sweep->parsed()) {
      command = "sweep", out = run_sweep(c);
    } else if (solve->parsed()) {
      command = "solve", out = run_solve(c);
    } else {
      command = "bounds", out = run_bounds(c);
    }
  } catch (const inconsistency& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInconsistent;
  }

  const std::string text =
      serialize(command, out.rows, out.notes, c.format == "csv" ? Format::csv : Format::json);
  if (c.output.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    std::ofstream f(c.output, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot open " << c.output << "\n";
      return kExitPrecondition;
    }
    f << text;
  }
  return 0;
}
