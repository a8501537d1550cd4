// gausscap — command-line front end for the library.
//
// Subcommands:
//   capacity    capacity bounds for the two-mode-unitary channel family over a
//               gain value or gain grid, as CSV or JSON records
//   figures     the two standing CSV data sets: boundary-coefficient traces
//               (fig1) and the scanned minimum recursion coefficient (fig2)
//   crosscheck  Gaussian-vs-Fock entropy comparison over a small preset grid
//   witness     degradability refutation: negativity scan below q = 1,
//               certified relative-entropy gap above it
//
// Exit codes: 0 success, 1 a requested check failed, 2 invalid input,
// 3 the search was inconclusive.
//
// All floating-point output uses the C locale with '.' as the decimal
// separator, 17 significant digits, and '\n' line endings, so repeated runs
// with the same inputs produce byte-identical files.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gausscap/capacities.hpp"
#include "gausscap/channels.hpp"
#include "gausscap/degradability.hpp"
#include "gausscap/fock.hpp"
#include "gausscap/symplectic.hpp"

namespace {

using gausscap::EnergyBudget;
using gausscap::TwoModeUnitary;
using json = nlohmann::ordered_json;

/// Invalid command-line input (beyond what the parser itself rejects).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A requested check failed; the message has already been reported.
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formatting and output plumbing.

std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Write `body` to `path`, or to stdout when the path is empty or "-".
void write_text(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::fwrite(body.data(), 1, body.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open output file: " + path);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw std::runtime_error("short write to " + path);
}

// ---------------------------------------------------------------------------
// Grids and parallel evaluation.

/// An end-inclusive arithmetic grid "lo:hi:step".  The final point is kept
/// whenever lo + n*step lands on hi to within a relative half-ulp guard, so
/// "0.51:0.99:0.01" yields 49 points ending exactly at 0.99.
struct GridSpec {
  double lo = 0.0, hi = 0.0, step = 0.0;

  std::vector<double> points() const {
    long n = std::max(std::lround((hi - lo) / step), 0L);
    while (n > 0 && lo + static_cast<double>(n) * step > hi + step * 1e-9) --n;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
  }
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  char trailing = '\0';
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &g.lo, &g.hi, &g.step, &trailing) != 3) {
    throw UsageError("grid must have the form lo:hi:step, got \"" + text + "\"");
  }
  if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || !std::isfinite(g.step)) {
    throw UsageError("grid endpoints and step must be finite");
  }
  if (!(g.step > 0.0)) throw UsageError("grid step must be positive");
  if (g.hi < g.lo) throw UsageError("grid upper endpoint lies below the lower one");
  return g;
}

/// Number of worker threads: GAUSSCAP_JOBS overrides --jobs, which overrides
/// the detected hardware parallelism.
int resolve_jobs(int requested) {
  if (const char* env = std::getenv("GAUSSCAP_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    std::fprintf(stderr, "gausscap: ignoring malformed GAUSSCAP_JOBS=\"%s\"\n", env);
  }
  if (requested >= 1) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Run work(0) .. work(n_tasks - 1) on a fixed pool.  Each task writes only
/// its own result slot, so output order is the grid order no matter how the
/// tasks interleave.  The first failure (by task index) is rethrown.
template <class Work>
void parallel_indexed(int n_tasks, int jobs, Work work) {
  jobs = std::min(jobs, n_tasks);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(n_tasks, 0)));
  if (jobs <= 1) {
    for (int i = 0; i < n_tasks; ++i) {
      try {
        work(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
          try {
            work(i);
          } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Shared channel-family helpers.

void require_valid_q(double q) {
  if (!std::isfinite(q) || q <= 0.0) {
    throw UsageError("q must be positive and finite, got " + fmt17(q));
  }
  if (q == 1.0) {
    throw UsageError(
        "q = 1 is the singular point of the two-mode unitary family "
        "(beam splitter for q < 1, two-mode squeezer for q > 1; no q = 1 member); "
        "choose q on either side");
  }
}

TwoModeUnitary unitary_for(double q) {
  return q < 1.0 ? gausscap::beam_splitter(q) : gausscap::two_mode_squeezer(q);
}

// ---------------------------------------------------------------------------
// capacity

struct CapacityOptions {
  double q = std::numeric_limits<double>::quiet_NaN();
  std::string q_range;
  double pa = 1.0;
  double pe = 1.0;
  std::string format = "csv";
  std::string output;
  int jobs = 0;
};

struct CapacityRecord {
  double q = 0.0, p_a = 0.0, p_e = 0.0;
  double q_closed = 0.0, q_energy_lb = 0.0, c_classical_lb = 0.0;
  double chi_h = 0.0, chi_a = 0.0, uncertainty_lb = 0.0, class_lb = 0.0;
  double conferencing_lb = 0.0;
};

constexpr const char* kCapacityColumns[] = {
    "q",     "p_a",   "p_e",            "q_closed", "q_energy_lb",    "c_classical_lb",
    "chi_h", "chi_a", "uncertainty_lb", "class_lb", "conferencing_lb"};

CapacityRecord capacity_record(double q, const EnergyBudget& budget) {
  const TwoModeUnitary u = unitary_for(q);
  CapacityRecord r;
  r.q = q;
  r.p_a = budget.p_a;
  r.p_e = budget.p_e;
  r.q_closed = gausscap::q_ghx_closed_form(q);
  r.q_energy_lb = gausscap::energy_constrained_q_lower_bound(u.dilation, budget);
  r.c_classical_lb = gausscap::classical_capacity_lower_bound(q, std::abs(1.0 - q), budget);
  const gausscap::UncertaintyReport rep = gausscap::uncertainty_report(
      u.dilation, gausscap::CovarianceMatrix::vacuum(1), budget);
  r.chi_h = rep.chi_h_lower;
  r.chi_a = rep.chi_a_lower;
  r.uncertainty_lb = rep.generic_bound;
  r.class_lb = rep.class_bound;
  r.conferencing_lb = gausscap::conferencing_lower_bound(u.dilation, budget.p_a);
  return r;
}

std::vector<double> record_values(const CapacityRecord& r) {
  return {r.q,     r.p_a,   r.p_e,            r.q_closed, r.q_energy_lb,    r.c_classical_lb,
          r.chi_h, r.chi_a, r.uncertainty_lb, r.class_lb, r.conferencing_lb};
}

int cmd_capacity(const CapacityOptions& opt) {
  std::vector<double> qs;
  if (!opt.q_range.empty()) {
    qs = parse_grid(opt.q_range).points();
    if (qs.empty()) throw UsageError("the q grid is empty");
  } else {
    if (std::isnan(opt.q)) throw UsageError("capacity needs --q or --q-range");
    qs.push_back(opt.q);
  }
  for (double q : qs) require_valid_q(q);
  const EnergyBudget budget{opt.pa, opt.pe};

  std::vector<CapacityRecord> records(qs.size());
  parallel_indexed(static_cast<int>(qs.size()), resolve_jobs(opt.jobs), [&](int i) {
    records[static_cast<std::size_t>(i)] = capacity_record(qs[static_cast<std::size_t>(i)], budget);
  });

  std::string body;
  if (opt.format == "csv") {
    std::string line;
    body += "# schema: gausscap.capacity.v1\n";
    for (const char* col : kCapacityColumns) {
      if (!line.empty()) line += ',';
      line += col;
    }
    body += line + "\n";
    for (const CapacityRecord& r : records) {
      line.clear();
      for (double v : record_values(r)) {
        if (!line.empty()) line += ',';
        line += fmt17(v);
      }
      body += line + "\n";
    }
  } else if (opt.format == "json") {
    json doc;
    doc["schema"] = "gausscap.capacity.v1";
    doc["records"] = json::array();
    for (const CapacityRecord& r : records) {
      json rec;
      const std::vector<double> vals = record_values(r);
      for (std::size_t i = 0; i < vals.size(); ++i) rec[kCapacityColumns[i]] = vals[i];
      doc["records"].push_back(std::move(rec));
    }
    body = doc.dump(2) + "\n";
  } else {
    throw UsageError("unknown format \"" + opt.format + "\" (expected csv or json)");
  }
  write_text(opt.output, body);
  return 0;
}

// ---------------------------------------------------------------------------
// figures

struct FiguresOptions {
  std::string which;  // fig1 | fig2 | all
  std::string output_dir = ".";
  std::string grid;  // optional lo:hi:step override
  int n_max = 50;
  int jobs = 0;
};

/// fig1: the interval-preset boundary coefficient along the beam-splitter
/// axis, plus both coefficient readings at the crossover point
/// q = 1/2 + sqrt(3)/6 where c(k2,-k1) vanishes.  Rows whose preset pair has
/// same-sign recursion slopes (no admissible reading) carry value "nan".
std::string figure1_csv(const std::vector<double>& grid, int jobs) {
  const double q_star = 0.5 + std::sqrt(3.0) / 6.0;
  struct Row {
    double q;
    gausscap::Fig1Preset preset;
  };
  std::vector<Row> rows;
  for (double q : grid) {
    if (std::abs(q - q_star) < 1e-15) continue;  // replaced by the explicit pair below
    rows.push_back({q, gausscap::fig1_preset(q)});
  }
  rows.push_back({q_star, {2, 1, "c(k2,-k1)"}});
  rows.push_back({q_star, {4, 2, "c(-k4,k2)"}});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.q < b.q; });

  std::vector<double> values(rows.size());
  parallel_indexed(static_cast<int>(rows.size()), jobs, [&](int i) {
    const Row& row = rows[static_cast<std::size_t>(i)];
    try {
      values[static_cast<std::size_t>(i)] =
          gausscap::c_coefficient_precise(row.q, row.preset.n, row.preset.m);
    } catch (const std::invalid_argument&) {
      values[static_cast<std::size_t>(i)] = std::numeric_limits<double>::quiet_NaN();
    }
  });

  // The labels contain commas, so that column is double-quoted.
  std::string body = "# schema: gausscap.fig1.v1\nq,label,value\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    body += fmt17(rows[i].q);
    body += ",\"";
    body += rows[i].preset.label;
    body += "\",";
    body += fmt17(values[i]);
    body += '\n';
  }
  return body;
}

/// fig2: minimum recursion coefficient over all admissible pairs up to n_max,
/// with the argmin pair.
std::string figure2_csv(const std::vector<double>& grid, int n_max, int jobs) {
  std::vector<gausscap::NegativityScan> scans(grid.size());
  parallel_indexed(static_cast<int>(grid.size()), jobs, [&](int i) {
    scans[static_cast<std::size_t>(i)] =
        gausscap::min_negativity_scan(grid[static_cast<std::size_t>(i)], n_max);
  });

  std::string body = "# schema: gausscap.fig2.v1\nq,min_value,n,m\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    body += fmt17(grid[i]);
    body += ',';
    body += scans[i].found ? fmt17(scans[i].value) : "nan";
    body += ',';
    body += std::to_string(scans[i].n);
    body += ',';
    body += std::to_string(scans[i].m);
    body += '\n';
  }
  return body;
}

int cmd_figures(const FiguresOptions& opt) {
  const bool want1 = opt.which == "fig1" || opt.which == "all";
  const bool want2 = opt.which == "fig2" || opt.which == "all";
  if (!want1 && !want2) {
    throw UsageError("figures takes fig1, fig2, or all; got \"" + opt.which + "\"");
  }
  if (opt.n_max < 1) throw UsageError("--n-max must be at least 1");
  const int jobs = resolve_jobs(opt.jobs);
  std::filesystem::create_directories(opt.output_dir);

  if (want1) {
    const GridSpec spec = opt.grid.empty() ? GridSpec{0.5, 0.99, 0.01} : parse_grid(opt.grid);
    const std::vector<double> grid = spec.points();
    for (double q : grid) {
      if (!(q >= 0.5 && q < 1.0)) {
        throw UsageError("fig1 preset pairs are defined on [0.5, 1); grid point " + fmt17(q) +
                         " lies outside");
      }
    }
    const std::filesystem::path path = std::filesystem::path(opt.output_dir) / "fig1.csv";
    const std::string body = figure1_csv(grid, jobs);
    write_text(path.string(), body);
    std::fprintf(stderr, "gausscap: wrote %s (%zu rows)\n", path.c_str(), grid.size() + 1);
  }
  if (want2) {
    const GridSpec spec = opt.grid.empty() ? GridSpec{0.51, 0.99, 0.01} : parse_grid(opt.grid);
    const std::vector<double> grid = spec.points();
    for (double q : grid) {
      if (!(q > 0.0 && q < 1.0)) {
        throw UsageError("fig2 scans beam splitters only; grid point " + fmt17(q) +
                         " lies outside (0, 1)");
      }
    }
    const std::filesystem::path path = std::filesystem::path(opt.output_dir) / "fig2.csv";
    const std::string body = figure2_csv(grid, opt.n_max, jobs);
    write_text(path.string(), body);
    std::fprintf(stderr, "gausscap: wrote %s (%zu rows)\n", path.c_str(), grid.size());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// crosscheck

struct CrosscheckOptions {
  std::vector<double> qs{0.6, 0.75};
  std::vector<double> nbars{0.0, 1.0, 3.0};
  std::vector<double> ss{0.0, 0.4};
  int cutoff = 60;
  double tol = 1e-6;
  std::string format = "csv";
  std::string output;
  int jobs = 0;
};

struct CrosscheckOutcome {
  gausscap::CrosscheckRow row;
  bool cutoff_failed = false;
  std::string error;
};

int cmd_crosscheck(const CrosscheckOptions& opt) {
  if (opt.qs.empty() || opt.nbars.empty() || opt.ss.empty()) {
    throw UsageError("crosscheck needs at least one q, nbar, and s value");
  }
  for (double q : opt.qs) {
    require_valid_q(q);
    if (q >= 1.0) throw UsageError("crosscheck compares beam splitters; q must lie in (0, 1)");
  }
  for (double nbar : opt.nbars) {
    if (!(nbar >= 0.0)) throw UsageError("--nbar must be >= 0");
  }
  if (opt.cutoff < 2) throw UsageError("--cutoff must be at least 2");
  if (!(opt.tol > 0.0)) throw UsageError("--tol must be positive");

  struct Case {
    double q, nbar, s;
  };
  std::vector<Case> cases;
  for (double q : opt.qs) {
    for (double nbar : opt.nbars) {
      for (double s : opt.ss) cases.push_back({q, nbar, s});
    }
  }

  std::vector<CrosscheckOutcome> outcomes(cases.size());
  parallel_indexed(static_cast<int>(cases.size()), resolve_jobs(opt.jobs), [&](int i) {
    const Case& c = cases[static_cast<std::size_t>(i)];
    CrosscheckOutcome& out = outcomes[static_cast<std::size_t>(i)];
    out.row.q = c.q;
    out.row.nbar = c.nbar;
    out.row.s = c.s;
    out.row.cutoff = opt.cutoff;
    try {
      out.row = gausscap::gaussian_fock_crosscheck(c.q, c.nbar, c.s, opt.cutoff);
    } catch (const gausscap::FockCutoffError& e) {
      out.cutoff_failed = true;
      out.error = e.what();
    }
  });

  int offenders = 0;
  std::string body;
  json doc;
  const bool as_json = opt.format == "json";
  if (as_json) {
    doc["schema"] = "gausscap.crosscheck.v1";
    doc["cutoff"] = opt.cutoff;
    doc["tol"] = opt.tol;
    doc["rows"] = json::array();
  } else if (opt.format == "csv") {
    body +=
        "# schema: gausscap.crosscheck.v1\n"
        "q,nbar,s,cutoff,s_b_gaussian,s_b_fock,s_f_gaussian,s_f_fock,worst_gap,status\n";
  } else {
    throw UsageError("unknown format \"" + opt.format + "\" (expected csv or json)");
  }

  for (const CrosscheckOutcome& out : outcomes) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double gap = out.cutoff_failed ? nan : out.row.worst_gap();
    const char* status =
        out.cutoff_failed ? "cutoff" : (gap <= opt.tol ? "ok" : "gap");
    if (std::strcmp(status, "ok") != 0) {
      ++offenders;
      std::fprintf(stderr, "gausscap: offender q=%g nbar=%g s=%g: %s\n", out.row.q, out.row.nbar,
                   out.row.s,
                   out.cutoff_failed
                       ? out.error.c_str()
                       : ("entropy gap " + fmt17(gap) + " exceeds tol " + fmt17(opt.tol)).c_str());
    }
    if (as_json) {
      json rec;
      rec["q"] = out.row.q;
      rec["nbar"] = out.row.nbar;
      rec["s"] = out.row.s;
      rec["cutoff"] = out.row.cutoff;
      rec["s_b_gaussian"] = out.cutoff_failed ? nan : out.row.s_b_gaussian;
      rec["s_b_fock"] = out.cutoff_failed ? nan : out.row.s_b_fock;
      rec["s_f_gaussian"] = out.cutoff_failed ? nan : out.row.s_f_gaussian;
      rec["s_f_fock"] = out.cutoff_failed ? nan : out.row.s_f_fock;
      rec["worst_gap"] = gap;
      rec["status"] = status;
      if (out.cutoff_failed) rec["error"] = out.error;
      doc["rows"].push_back(std::move(rec));
    } else {
      body += fmt17(out.row.q) + "," + fmt17(out.row.nbar) + "," + fmt17(out.row.s) + "," +
              std::to_string(out.row.cutoff) + "," +
              fmt17(out.cutoff_failed ? nan : out.row.s_b_gaussian) + "," +
              fmt17(out.cutoff_failed ? nan : out.row.s_b_fock) + "," +
              fmt17(out.cutoff_failed ? nan : out.row.s_f_gaussian) + "," +
              fmt17(out.cutoff_failed ? nan : out.row.s_f_fock) + "," + fmt17(gap) + "," + status +
              "\n";
    }
  }
  if (as_json) body = doc.dump(2) + "\n";
  write_text(opt.output, body);

  if (offenders > 0) {
    std::fprintf(stderr, "gausscap: crosscheck failed for %d of %zu rows (cutoff %d, tol %g)\n",
                 offenders, outcomes.size(), opt.cutoff, opt.tol);
    return 1;
  }
  std::fprintf(stderr, "gausscap: crosscheck passed for all %zu rows (cutoff %d, tol %g)\n",
               outcomes.size(), opt.cutoff, opt.tol);
  return 0;
}

// ---------------------------------------------------------------------------
// witness

struct WitnessOptions {
  double q = std::numeric_limits<double>::quiet_NaN();
  std::string rational;  // "x/y"
  std::vector<double> eps;
  int n_max = 50;
  std::string output;
};

json witness_to_json(const gausscap::DegradabilityWitness& w, bool revalidated) {
  json rec;
  rec["kind"] = gausscap::to_string(w.kind);
  rec["q"] = w.q;
  if (w.kind == gausscap::WitnessKind::negativity) {
    rec["n"] = w.n;
    rec["m"] = w.m;
    rec["value"] = w.value;
    rec["threshold"] = gausscap::kWitnessTol;
  } else {
    rec["m1"] = w.n;
    rec["m2"] = w.m;
    rec["gap_lo"] = w.gap_lo;
    rec["gap_hi"] = w.gap_hi;
    rec["truncation"] = w.truncation;
    rec["support_violation"] = w.support_violation;
  }
  rec["revalidated"] = revalidated;
  return rec;
}

std::pair<long long, long long> parse_rational(const std::string& text) {
  long long x = 0, y = 1;
  char trailing = '\0';
  const int got = std::sscanf(text.c_str(), "%lld/%lld%c", &x, &y, &trailing);
  if (got == 2) return {x, y};
  if (std::sscanf(text.c_str(), "%lld%c", &x, &trailing) == 1) return {x, 1};
  throw UsageError("--rational must have the form x/y with integers, got \"" + text + "\"");
}

int cmd_witness(const WitnessOptions& opt) {
  const bool have_q = !std::isnan(opt.q);
  const bool have_rational = !opt.rational.empty();
  if (have_q == have_rational) {
    throw UsageError("witness needs exactly one of --q or --rational x/y");
  }
  if (opt.n_max < 1) throw UsageError("--n-max must be at least 1");
  for (double e : opt.eps) {
    if (!(e > 0.0)) throw UsageError("--eps values must be positive");
  }

  json doc;
  doc["schema"] = "gausscap.witness.v1";
  std::vector<std::string> diagnostics;
  std::optional<gausscap::DegradabilityWitness> witness;

  if (have_q && opt.q < 1.0) {
    // Beam-splitter side: scan the recursion coefficients for negativity.
    require_valid_q(opt.q);
    doc["query"] = {{"mode", "negativity-scan"}, {"q", opt.q}, {"n_max", opt.n_max}};
    const gausscap::NegativityScan scan = gausscap::min_negativity_scan(opt.q, opt.n_max);
    diagnostics.push_back("scan arithmetic: " + std::string(gausscap::to_string(scan.arithmetic)));
    if (!scan.found) {
      diagnostics.push_back("no admissible coefficient pair up to n_max=" +
                            std::to_string(opt.n_max));
    } else {
      diagnostics.push_back("scan minimum " + fmt17(scan.value) + " at pair (n=" +
                            std::to_string(scan.n) + ", m=" + std::to_string(scan.m) + ")");
      if (scan.value < gausscap::kWitnessTol) {
        gausscap::DegradabilityWitness w;
        w.q = opt.q;
        w.kind = gausscap::WitnessKind::negativity;
        w.n = scan.n;
        w.m = scan.m;
        w.value = scan.value;
        witness = w;
      } else {
        diagnostics.push_back("minimum is not below the witness threshold " +
                              fmt17(gausscap::kWitnessTol) +
                              "; try a larger --n-max or a q further from the boundary");
      }
    }
  } else {
    // Amplifier side: certified relative-entropy gap near a rational gain.
    long long x = 0, y = 1;
    if (have_rational) {
      std::tie(x, y) = parse_rational(opt.rational);
    } else {
      require_valid_q(opt.q);
      const auto frac = gausscap::rationalize(opt.q);
      if (!frac) {
        throw UsageError("q = " + fmt17(opt.q) +
                         " is not recognizably rational; pass --rational x/y instead");
      }
      x = frac->first;
      y = frac->second;
    }
    doc["query"] = {{"mode", "relative-entropy-gap"}, {"x", x}, {"y", y}};
    const std::vector<double> default_eps{1e-3, 1e-4, 1e-5, 1e-6};
    const std::vector<double>& eps = opt.eps.empty() ? default_eps : opt.eps;
    doc["query"]["eps_grid"] = eps;
    const gausscap::FindViolationResult found =
        gausscap::find_violation_near_rational(x, y, eps);
    std::istringstream lines(found.diagnostics);
    for (std::string line; std::getline(lines, line);) {
      if (!line.empty()) diagnostics.push_back(line);
    }
    if (found.found) witness = found.witness;
  }

  bool revalidated = false;
  if (witness) {
    revalidated = gausscap::revalidate_witness(*witness);
    if (!revalidated) {
      diagnostics.push_back("revalidation in higher precision failed; withholding the witness");
      witness.reset();
    }
  }

  doc["conclusive"] = witness.has_value();
  doc["witness"] = witness ? witness_to_json(*witness, revalidated) : json(nullptr);
  doc["diagnostics"] = diagnostics;
  write_text(opt.output, doc.dump(2) + "\n");

  if (!witness) {
    for (const std::string& line : diagnostics) {
      std::fprintf(stderr, "gausscap: %s\n", line.c_str());
    }
    std::fprintf(stderr, "gausscap: inconclusive: no certified witness found\n");
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gausscap: capacity bounds, figure data, Gaussian-vs-Fock cross-checks, and\n"
      "degradability witnesses for the one-parameter two-mode unitary family"};
  app.set_version_flag("--version", "gausscap 1.0.0");
  app.set_config("--config", "", "Read options from a flat key=value file (see README)");
  app.require_subcommand(1);

  CapacityOptions cap;
  CLI::App* capacity = app.add_subcommand("capacity", "Capacity bound records over q");
  CLI::Option* cap_q = capacity->add_option("--q", cap.q, "Channel parameter q (q > 0, q != 1)");
  capacity->add_option("--q-range", cap.q_range, "End-inclusive grid lo:hi:step over q")
      ->excludes(cap_q);
  capacity->add_option("--pa", cap.pa, "Input mean photon number P_A")->capture_default_str();
  capacity->add_option("--pe", cap.pe, "Environment mean photon number P_E")->capture_default_str();
  capacity->add_option("--format", cap.format, "Output format: csv or json")->capture_default_str();
  capacity->add_option("--output,-o", cap.output, "Output path (default stdout)");
  capacity->add_option("--jobs,-j", cap.jobs, "Worker threads (default: hardware)");

  FiguresOptions fig;
  CLI::App* figures = app.add_subcommand("figures", "Write fig1.csv / fig2.csv data sets");
  figures->add_option("which", fig.which, "Which data set: fig1, fig2, or all")->required();
  figures->add_option("--output-dir", fig.output_dir, "Directory for the CSV files")->capture_default_str();
  figures->add_option("--grid", fig.grid, "Override the default q grid (lo:hi:step)");
  figures->add_option("--n-max", fig.n_max, "fig2 scan depth")->capture_default_str();
  figures->add_option("--jobs,-j", fig.jobs, "Worker threads (default: hardware)");

  CrosscheckOptions cross;
  CLI::App* crosscheck =
      app.add_subcommand("crosscheck", "Gaussian-vs-Fock output entropies on a preset grid");
  crosscheck->add_option("--q", cross.qs, "Beam-splitter transmissivities (repeatable)")
      ->expected(-1);
  crosscheck->add_option("--nbar", cross.nbars, "Thermal input occupations (repeatable)")
      ->expected(-1);
  crosscheck->add_option("--s", cross.ss, "Environment squeezing values (repeatable)")
      ->expected(-1);
  crosscheck->add_option("--cutoff", cross.cutoff, "Fock-space cutoff dimension")->capture_default_str();
  crosscheck->add_option("--tol", cross.tol, "Largest tolerated entropy gap")->capture_default_str();
  crosscheck->add_option("--format", cross.format, "Output format: csv or json")->capture_default_str();
  crosscheck->add_option("--output,-o", cross.output, "Output path (default stdout)");
  crosscheck->add_option("--jobs,-j", cross.jobs, "Worker threads (default: hardware)");

  WitnessOptions wit;
  CLI::App* witness =
      app.add_subcommand("witness", "Search for a degradability-violation witness at q");
  witness->add_option("--q", wit.q, "Channel parameter (q < 1 scans; rational q > 1 certifies)");
  witness->add_option("--rational", wit.rational, "Amplifier gain as a fraction x/y");
  witness->add_option("--eps", wit.eps, "Offsets above x/y to probe (repeatable)")->expected(-1);
  witness->add_option("--n-max", wit.n_max, "Negativity scan depth")->capture_default_str();
  witness->add_option("--output,-o", wit.output, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
    if (capacity->parsed()) return cmd_capacity(cap);
    if (figures->parsed()) return cmd_figures(fig);
    if (crosscheck->parsed()) return cmd_crosscheck(cross);
    if (witness->parsed()) return cmd_witness(wit);
    return 2;  // unreachable with require_subcommand(1)
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "gausscap: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "gausscap: %s\n", e.what());
    return 2;
  } catch (const CheckFailure& e) {
    std::fprintf(stderr, "gausscap: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gausscap: internal error: %s\n", e.what());
    return 1;
  }
}
