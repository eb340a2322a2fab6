// latvis command-line tool: exact hyperplane densities, brute-force
// convergence estimates, Smith Normal Form inspection, and density-set
// analysis (intervals / greedy / gaps / sample).
//
// Exit codes: 0 success, 2 parse error, 3 mathematical precondition
// violation (e.g. a hyperplane with no integral points), 4 tolerance
// failure in `estimate`, 5 overflow/resource guard.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latvis/densityset.hpp"
#include "latvis/enumerate.hpp"
#include "latvis/io.hpp"

namespace {

using namespace latvis;

struct ParseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Int> parse_int_list(const std::string& s) {
  std::vector<Int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) throw ParseFailure("empty integer in list: '" + s + "'");
    try {
      out.emplace_back(tok);
    } catch (const std::exception&) {
      throw ParseFailure("not an integer: '" + tok + "'");
    }
  }
  if (out.empty()) throw ParseFailure("empty integer list");
  return out;
}

IntMatrix parse_matrix(const std::string& s) {
  std::vector<std::vector<Int>> rows;
  std::stringstream ss(s);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_int_list(row));
  if (rows.empty()) throw ParseFailure("empty matrix");
  IntMatrix m(int(rows.size()), int(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ParseFailure("ragged matrix rows");
    for (size_t j = 0; j < rows[i].size(); ++j) m.at(int(i), int(j)) = rows[i][j];
  }
  return m;
}

HyperplaneSystem parse_plane(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw ParseFailure("plane spec needs the form \"c1,c2,...,cn=b\"");
  const std::vector<Int> a = parse_int_list(s.substr(0, eq));
  Int b;
  try {
    b = Int(s.substr(eq + 1));
  } catch (const std::exception&) {
    throw ParseFailure("right-hand side is not an integer");
  }
  return HyperplaneSystem::from_rhs(IntMatrix(1, int(a.size()), a), {b});
}

HyperplaneSystem parse_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseFailure("cannot open system file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseFailure(std::string("bad JSON: ") + e.what());
  }
  if (!j.contains("A")) throw ParseFailure("system file needs an \"A\" matrix");
  IntMatrix a;
  from_json(j.at("A"), a);
  if (j.contains("p")) {
    std::vector<Int> p;
    for (const auto& cell : j.at("p")) p.push_back(cell.is_string() ? Int(cell.get<std::string>()) : Int(cell.get<int64_t>()));
    return HyperplaneSystem::from_base_point(std::move(a), std::move(p));
  }
  if (j.contains("b")) {
    std::vector<Int> b;
    for (const auto& cell : j.at("b")) b.push_back(cell.is_string() ? Int(cell.get<std::string>()) : Int(cell.get<int64_t>()));
    return HyperplaneSystem::from_rhs(std::move(a), std::move(b));
  }
  throw ParseFailure("system file needs either \"b\" or \"p\"");
}

std::vector<std::vector<Int>> parse_points(const std::string& s) {
  std::vector<std::vector<Int>> pts;
  std::stringstream ss(s);
  std::string row;
  while (std::getline(ss, row, ';')) pts.push_back(parse_int_list(row));
  if (pts.empty()) throw ParseFailure("empty point list");
  return pts;
}

std::vector<int64_t> parse_schedule(const std::string& s) {
  std::vector<int64_t> out;
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const int64_t lo = std::stoll(s.substr(0, dots));
    std::string rest = s.substr(dots + 2);
    int64_t factor = 10;
    const auto x = rest.find('x');
    if (x != std::string::npos) {
      factor = std::stoll(rest.substr(x + 1));
      rest = rest.substr(0, x);
    }
    const int64_t hi = std::stoll(rest);
    if (lo < 1 || hi < lo || factor < 2) throw ParseFailure("bad schedule range (want lo..hi[xFACTOR])");
    for (int64_t r = lo; r <= hi; r *= factor) out.push_back(r);
    return out;
  }
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoll(tok));
  if (out.empty()) throw ParseFailure("empty schedule");
  return out;
}

struct SystemOptions {
  std::string plane, system_file, points, matrix;
  int box_dim = 0;

  void add_to(CLI::App* cmd, bool with_points, bool with_matrix) {
    cmd->add_option("--plane", plane, "single hyperplane \"c1,c2,...,cn=b\"");
    cmd->add_option("--system", system_file, "JSON file {\"A\": [[...]], \"b\": [...]} or {\"A\": [[...]], \"p\": [...]}");
    cmd->add_option("--box", box_dim, "full lattice Z^n (no constraints)");
    if (with_points) cmd->add_option("--points", points, "n points \"x1,...,xn;...\" interpolating a hyperplane");
    if (with_matrix) cmd->add_option("--matrix", matrix, "inline matrix \"a,b;c,d\"");
  }

  int provided() const {
    return int(!plane.empty()) + int(!system_file.empty()) + int(!points.empty()) + int(box_dim > 0);
  }

  HyperplaneSystem build() const {
    if (!plane.empty()) return parse_plane(plane);
    if (!system_file.empty()) return parse_system_file(system_file);
    if (box_dim > 0) {
      IntMatrix zero(1, box_dim);
      return HyperplaneSystem::from_rhs(std::move(zero), {Int(0)});
    }
    throw ParseFailure("no system given: use --plane, --system or --box");
  }
};

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw ParseFailure("cannot open output file: " + path);
  return file;
}

std::string value_string(const DensityValue& v) {
  if (v.kind == DensityValue::Kind::FiniteProduct) return to_string(v.value);
  if (v.zeta_argument == 1) return "0 (= 1/zeta(1))";
  return "1/zeta(" + std::to_string(v.zeta_argument) + ")";
}

void print_density_human(std::ostream& os, const DensityResult& r) {
  os << "density: " << value_string(r.density) << " (= " << fmt_double(r.density.numeric()) << ")\n";
  os << "ambient dimension: " << r.ambient << ", codimension (rank): " << r.codim << ", k: " << r.k << "\n";
  os << "invariant factors:";
  for (const Int& d : r.snf.invariant_factors) os << ' ' << d.str();
  if (r.snf.invariant_factors.empty()) os << " (none)";
  os << "\nanchor gcd b': " << r.anchor_gcd.str() << "\n";
  if (r.point_determinant) os << "point determinant d: " << r.point_determinant->str() << "\n";
  os << "path: " << to_string(r.path);
  if (r.extrapolated) os << " (extrapolated case)";
  os << "\n";
}

int cmd_density(const SystemOptions& sysopt, unsigned k, const std::string& format, const std::string& out_path) {
  DensityResult res;
  if (!sysopt.points.empty()) {
    if (k != 1) throw std::domain_error("--points computes visible-point density (k = 1 only)");
    res = density_from_points(parse_points(sysopt.points));
  } else {
    const HyperplaneSystem sys = sysopt.build();
    if (sys.equation_count() == 1 && smith_normal_form(sys.a).rank == 1) {
      res = density_of_hyperplane(sys.a.row(0), sys.rhs[0], k);
    } else {
      res = density_of_system(sys, k);
      if (auto shortcut = dm1_shortcut(sys, k)) {
        if (shortcut->density != res.density) throw std::logic_error("dm=1 shortcut disagrees with the SNF engine");
        res.path = DensityPath::DmOne;
      }
    }
  }
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  if (format == "json")
    os << json(res).dump(2) << "\n";
  else
    print_density_human(os, res);
  return 0;
}

int cmd_estimate(const SystemOptions& sysopt, unsigned k, const std::string& schedule_spec, double tol,
                 std::optional<int64_t> coprime_to, unsigned threads, const std::string& format,
                 const std::string& out_path) {
  const HyperplaneSystem sys = sysopt.build();
  const std::vector<int64_t> schedule = parse_schedule(schedule_spec);
  const ConvergenceTrace tr = convergence_trace(sys, k, coprime_to, schedule, threads);

  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  if (format == "json") {
    os << json(tr).dump(2) << "\n";
  } else if (format == "csv") {
    write_trace_csv(os, tr);
  } else {
    os << "predicted density: " << value_string(tr.predicted) << " (= " << fmt_double(tr.predicted.numeric())
       << ")\n";
    os << "r\ttotal\thits\tratio\tdeviation\n";
    for (const TraceRow& row : tr.rows)
      os << row.box.r << '\t' << row.box.total << '\t' << row.box.hits << '\t' << fmt_double(row.box.ratio_float)
         << '\t' << fmt_double(row.deviation) << (row.deviation_grew ? "  (grew)" : "") << '\n';
    os << "final deviation: " << fmt_double(tr.final_deviation) << (tr.final_deviation < tol ? " < " : " >= ")
       << fmt_double(tol) << "\n";
  }
  return tr.final_deviation < tol ? 0 : 4;
}

int cmd_snf(const SystemOptions& sysopt, const std::string& format, const std::string& out_path) {
  IntMatrix a;
  if (!sysopt.matrix.empty())
    a = parse_matrix(sysopt.matrix);
  else if (!sysopt.system_file.empty()) {
    std::ifstream in(sysopt.system_file);
    if (!in) throw ParseFailure("cannot open system file: " + sysopt.system_file);
    json j;
    in >> j;
    from_json(j.contains("A") ? j.at("A") : j, a);
  } else {
    throw ParseFailure("no matrix given: use --matrix or --system");
  }
  const SnfDecomposition snf = smith_normal_form(a);

  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  if (format == "json") {
    os << json(snf).dump(2) << "\n";
    return 0;
  }
  auto print_matrix = [&os](const char* name, const IntMatrix& m) {
    os << name << ":\n";
    for (int i = 0; i < m.rows(); ++i) {
      os << "  ";
      for (int c = 0; c < m.cols(); ++c) os << m.at(i, c).str() << (c + 1 < m.cols() ? " " : "");
      os << "\n";
    }
  };
  print_matrix("D", snf.d);
  print_matrix("U", snf.u);
  print_matrix("V", snf.v);
  os << "invariant factors:";
  for (const Int& d : snf.invariant_factors) os << ' ' << d.str();
  if (snf.invariant_factors.empty()) os << " (none)";
  os << "\nrank: " << snf.rank << "\n";
  return 0;
}

std::string endpoint_string(const IntervalEndpoint& e) {
  std::string s = to_string(e.coeff);
  if (e.zeta_power > 0) s += " * 1/zeta(" + std::to_string(e.zeta_arg) + ")";
  s += " (= " + fmt_double(e.value) + ")";
  return s;
}

int cmd_dset_intervals(unsigned n, uint64_t prime_bound, const std::string& format, const std::string& out_path) {
  const IntervalUnion u = dn_intervals(n, prime_bound);
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  if (format == "json") {
    os << json(u).dump(2) << "\n";
    return 0;
  }
  os << "closure of the density set for n = " << u.n << ": " << u.intervals.size() << " interval(s), "
     << (u.certified ? "certified" : "NON-CERTIFIED") << "\n";
  if (!u.note.empty()) os << "note: " << u.note << "\n";
  for (const DensityInterval& iv : u.intervals)
    os << "  [" << endpoint_string(iv.lo) << ", " << endpoint_string(iv.hi) << "]\n";
  return 0;
}

int cmd_dset_greedy(double target, unsigned n, unsigned steps, uint64_t prime_bound, const std::string& format,
                    const std::string& out_path) {
  const GreedyApproximation g = greedy_approximate(target, n, steps, prime_bound);
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  if (format == "json") {
    json j = g;
    if (g.n == 1) {
      json lines = json::array();
      for (size_t i = 0; i < g.steps.size(); ++i) lines.push_back(hyperplane_for_approximation(g, i));
      j["lines"] = std::move(lines);
    }
    os << j.dump(2) << "\n";
    return 0;
  }
  os << "greedy approximation of " << fmt_double(g.target) << " by prod (1 - 1/p^" << g.n << ")\n";
  os << "step\tprime\tpartial\tfloat\tresidual\n";
  for (size_t i = 0; i < g.steps.size(); ++i) {
    const GreedyStep& s = g.steps[i];
    os << i + 1 << '\t' << s.prime << '\t' << to_string(s.partial) << '\t' << fmt_double(s.partial_float) << '\t'
       << fmt_double(s.residual) << '\n';
  }
  if (g.n == 1) {
    for (size_t i = 0; i < g.steps.size(); ++i) {
      const HyperplaneEquation eq = hyperplane_for_approximation(g, i);
      os << "line " << eq.a[0].str() << "x + " << eq.a[1].str() << "y = " << eq.b.str() << "  (density "
         << to_string(g.steps[i].partial) << ")\n";
    }
  }
  if (g.reached_exact) os << "target reached exactly\n";
  if (g.unreachable) os << "target flagged unreachable (tail product cannot bridge the gap)\n";
  if (g.prime_bound_exhausted) os << "stopped: no admissible prime below " << g.prime_bound << "\n";
  return 0;
}

int cmd_dset_gaps(unsigned n_min, unsigned n_max, double tol, const std::string& format, const std::string& out_path) {
  std::vector<GapCertificate> certs;
  for (unsigned n = n_min; n <= n_max; ++n) certs.push_back(gap_certificate(n, tol));
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  if (format == "json") {
    os << json(certs).dump(2) << "\n";
    return 0;
  }
  os << "n\tleft = 1 - 2^-n\tright in\tmargin >=\n";
  for (const GapCertificate& c : certs)
    os << c.n << '\t' << to_string(c.left) << " (= " << fmt_double(c.left_float) << ")\t[" << fmt_double(c.right_lo)
       << ", " << fmt_double(c.right_hi) << "]\t" << fmt_double(c.margin_lo) << '\n';
  return 0;
}

int cmd_dset_sample(unsigned n, uint64_t prime_bound, unsigned max_primes, const std::string& format,
                    const std::string& out_path) {
  const std::vector<SampleEntry> entries = dn_sample(n, prime_bound, max_primes);
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  if (format == "json")
    os << json(entries).dump(2) << "\n";
  else
    write_sample_csv(os, entries);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "latvis: exact asymptotic densities of k-visible lattice points on hyperplane\n"
      "intersections, with brute-force verification and density-set analysis.\n"
      "Thread count: --threads or the LATVIS_THREADS environment variable.\n"
      "CSV columns: estimate -> r,total,hits,ratio,predicted,deviation;\n"
      "             dset sample -> b,primes,value_num,value_den,value."};
  app.require_subcommand(1);

  std::string format = "human", out_path;
  app.add_option("--format", format, "output format: human | json | csv")->capture_default_str();
  app.add_option("--out", out_path, "write output to a file instead of stdout");

  unsigned k = 1;
  SystemOptions density_sys, estimate_sys, snf_sys;

  CLI::App* density = app.add_subcommand("density", "exact density of k-visible points on a hyperplane system");
  density->fallthrough();
  density_sys.add_to(density, true, false);
  density->add_option("--k", k, "power-free order k (1 = visible points)")->capture_default_str();

  CLI::App* estimate = app.add_subcommand("estimate", "brute-force box counts converging to the exact density");
  estimate->fallthrough();
  estimate_sys.add_to(estimate, false, false);
  unsigned est_k = 1, threads = 0;
  std::string schedule = "10,100,1000";
  double est_tol = 1e-3;
  int64_t coprime_to = 0;
  estimate->add_option("--k", est_k, "power-free order k")->capture_default_str();
  estimate->add_option("--schedule", schedule, "radii: \"r1,r2,...\" or \"lo..hi[xFACTOR]\"")->capture_default_str();
  estimate->add_option("--tol", est_tol, "final-deviation tolerance (exit 4 when missed)")->capture_default_str();
  estimate->add_option("--coprime-to", coprime_to, "count points k-free relative to this b instead of k-visible");
  estimate->add_option("--threads", threads, "worker threads (0 = auto)");

  CLI::App* snf = app.add_subcommand("snf", "Smith Normal Form D = U A V of an integer matrix");
  snf->fallthrough();
  snf_sys.add_to(snf, false, true);

  CLI::App* dset = app.add_subcommand("dset", "density-set analysis");
  dset->fallthrough();
  dset->require_subcommand(1);

  unsigned ds_n = 2, ds_steps = 3, ds_max_primes = 20, gaps_n = 2, gaps_n_max = 0;
  uint64_t ds_prime_bound = 100000;
  double ds_target = 0.5, gaps_tol = 1e-6;

  CLI::App* intervals = dset->add_subcommand("intervals", "interval decomposition of the closure of D_n");
  intervals->fallthrough();
  intervals->add_option("--n", ds_n, "exponent n")->capture_default_str();
  intervals->add_option("--prime-bound", ds_prime_bound, "sieve bound for the threshold criterion")->capture_default_str();

  CLI::App* greedy = dset->add_subcommand("greedy", "greedy Euler-product approximation of a target density");
  greedy->fallthrough();
  greedy->add_option("--target", ds_target, "target in (0,1)")->required();
  greedy->add_option("--n", ds_n, "exponent n")->capture_default_str();
  greedy->add_option("--steps", ds_steps, "number of greedy steps")->capture_default_str();
  greedy->add_option("--prime-bound", ds_prime_bound, "largest prime the greedy scan may use")->capture_default_str();

  CLI::App* gaps = dset->add_subcommand("gaps", "certified gaps (1 - 2^-n, prod_{p != 2} 1 - p^-n)");
  gaps->fallthrough();
  gaps->add_option("--n", gaps_n, "exponent n (>= 2)")->capture_default_str();
  gaps->add_option("--n-max", gaps_n_max, "certify every n in [--n, --n-max]");
  gaps->add_option("--tol", gaps_tol, "enclosure tolerance")->capture_default_str();

  CLI::App* sample = dset->add_subcommand("sample", "all densities over prime sets up to a bound (CSV)");
  sample->fallthrough();
  sample->add_option("--n", ds_n, "exponent n")->capture_default_str();
  sample->add_option("--prime-bound", ds_prime_bound, "largest prime allowed in the factorization")->capture_default_str();
  sample->add_option("--max-primes", ds_max_primes, "guard on the prime count (2^count values)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (density->parsed()) {
      if (density_sys.provided() + int(!density_sys.points.empty()) == 0)
        throw ParseFailure("no system given: use --plane, --system, --points or --box");
      return cmd_density(density_sys, k, format, out_path);
    }
    if (estimate->parsed()) {
      return cmd_estimate(estimate_sys, est_k, schedule, est_tol,
                          coprime_to == 0 ? std::nullopt : std::optional<int64_t>(coprime_to), threads, format,
                          out_path);
    }
    if (snf->parsed()) return cmd_snf(snf_sys, format, out_path);
    if (dset->parsed()) {
      if (intervals->parsed()) return cmd_dset_intervals(ds_n, ds_prime_bound, format, out_path);
      if (greedy->parsed()) return cmd_dset_greedy(ds_target, ds_n, ds_steps, ds_prime_bound, format, out_path);
      if (gaps->parsed()) return cmd_dset_gaps(gaps_n, gaps_n_max == 0 ? gaps_n : gaps_n_max, gaps_tol, format, out_path);
      if (sample->parsed()) return cmd_dset_sample(ds_n, ds_prime_bound, ds_max_primes, format, out_path);
    }
    throw ParseFailure("no command given");
  } catch (const ParseFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::overflow_error& e) {
    std::cerr << "overflow guard: " << e.what() << "\n";
    return 5;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
