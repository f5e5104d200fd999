#include "lvb/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>

#include "lvb/bounds.hpp"
#include "lvb/csv.hpp"
#include "lvb/errors.hpp"
#include "lvb/lambert.hpp"
#include "lvb/trajectories.hpp"
#include "lvb/verify.hpp"

namespace lvb::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct HelpShown {};

double relerr(double bound, double exact) { return std::fabs(bound / exact - 1.0); }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file " + path.string());
  return f;
}

std::uint64_t seed_from_env() {
  const char* env = std::getenv("LVB_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || *env == '-') {
    throw ConfigError(std::string("LVB_SEED is not a non-negative integer: ") + env);
  }
  return v;
}

// Rows of the bounds table, kept as named values so figure panels can pick
// their columns.
struct BoundsRow {
  double y, Y, x, z;
  FirstOrderZBounds first;
  SecondOrderZBounds second;
  ElementaryWChain s09;
};

BoundsRow bounds_row(double y) {
  if (!(y > 1.0) || !std::isfinite(y)) {
    throw DomainError("bounds grid must lie in (1, inf) (got " + csv::format(y) + ")");
  }
  BoundsRow r;
  r.y = y;
  r.Y = y * std::exp(-y);
  r.z = exact_z(y);
  r.x = exact_small_root(y);
  r.first = first_order_z_bounds(r.Y);
  r.second = second_order_z_bounds(r.Y);
  r.s09 = elementary_w_chain(y);
  return r;
}

const std::vector<std::string> kBoundsHeader = {
    "y",          "Y",           "x_exact",        "z_exact",        "z1",
    "z2",         "z0",          "tz1",            "tz2",            "tz3",
    "s09_lo_a",   "s09_lo_b",    "s09_up",         "relerr_z1",      "relerr_z2",
    "relerr_z0",  "relerr_tz1",  "relerr_tz2",     "relerr_tz3",     "relerr_s09_lo_a",
    "relerr_s09_lo_b", "relerr_s09_up"};

std::vector<double> bounds_values(const BoundsRow& r) {
  // The elementary chain bounds W(-y e^{-y}); it is reported as x = -W, so
  // the "lo" columns are upper bounds on x.
  const double lo_a = -r.s09.lower_a;
  const double lo_b = -r.s09.lower_b;
  const double up = -r.s09.upper;
  return {r.y,
          r.Y,
          r.x,
          r.z,
          r.first.z1,
          r.first.z2,
          r.first.z0,
          r.second.tz1,
          r.second.tz2,
          r.second.tz3,
          lo_a,
          lo_b,
          up,
          relerr(r.first.z1, r.z),
          relerr(r.first.z2, r.z),
          relerr(r.first.z0, r.z),
          relerr(r.second.tz1, r.z),
          relerr(r.second.tz2, r.z),
          relerr(r.second.tz3, r.z),
          relerr(lo_a, r.x),
          relerr(lo_b, r.x),
          relerr(up, r.x)};
}

struct LambertRow {
  double X, W;
  double Z1 = kNaN, Z2 = kNaN, Z0 = kNaN, TZ1 = kNaN, TZ2 = kNaN, TZ3 = kNaN;
  double hh08;
  double ser[5];
};

LambertRow lambert_row(double X) {
  LambertRow r;
  r.X = X;
  r.W = lambert_w(X);
  if (X < 0.0 && X > -kInvE) {
    const FirstOrderWBounds f = first_order_w_bounds(X);
    const SecondOrderWBounds s = second_order_w_bounds(X);
    r.Z1 = f.w1;
    r.Z2 = f.w2;
    r.Z0 = f.w0;
    r.TZ1 = s.w1;
    r.TZ2 = s.w2;
    r.TZ3 = s.w3;
  }
  r.hh08 = w_tangent_upper(X);
  for (int n = 2; n <= 6; ++n) r.ser[n - 2] = w_series(X, n);
  return r;
}

const std::vector<std::string> kLambertHeader = {
    "X",           "W",           "Z1",          "Z2",          "Z0",          "TZ1",
    "TZ2",         "TZ3",         "hh08",        "ser2",        "ser3",        "ser4",
    "ser5",        "ser6",        "relerr_Z1",   "relerr_Z2",   "relerr_Z0",   "relerr_TZ1",
    "relerr_TZ2",  "relerr_TZ3",  "relerr_hh08", "relerr_ser2", "relerr_ser3", "relerr_ser4",
    "relerr_ser5", "relerr_ser6"};

std::vector<double> lambert_values(const LambertRow& r) {
  std::vector<double> v = {r.X,  r.W,   r.Z1,  r.Z2,  r.Z0,  r.TZ1, r.TZ2,
                           r.TZ3, r.hh08, r.ser[0], r.ser[1], r.ser[2], r.ser[3], r.ser[4]};
  const std::size_t n = v.size();
  for (std::size_t i = 2; i < n; ++i) {
    // relerr is undefined at W = 0 and for empty cells; both stay empty.
    v.push_back(r.W == 0.0 || std::isnan(v[i]) ? kNaN : relerr(v[i], r.W));
  }
  return v;
}

template <class Row, class Make>
std::vector<Row> evaluate(const std::vector<double>& points, Make make) {
  std::vector<Row> rows;
  rows.reserve(points.size());
  for (double p : points) rows.push_back(make(p));
  return rows;
}

// Picks named columns out of a full row.
void write_columns(std::ostream& out, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows,
                   const std::vector<std::string>& pick,
                   const std::vector<std::string>& rename = {}) {
  std::vector<std::size_t> idx;
  for (const std::string& p : pick) {
    const auto it = std::find(header.begin(), header.end(), p);
    if (it == header.end()) throw std::logic_error("unknown column " + p);
    idx.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  csv::Writer w(out);
  w.header(rename.empty() ? pick : rename);
  std::vector<double> sel(idx.size());
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < idx.size(); ++i) sel[i] = row[idx[i]];
    w.row(sel);
  }
}

struct SimulationOutcome {
  IntegrationResult trajectory;
  std::vector<std::string> event_header;
  std::vector<double> event_row;  // empty when no event was requested
};

SimulationOutcome simulate(const RunConfig& c) {
  IntegrationOptions opts;
  opts.t_max = c.t_max;
  SimulationOutcome o;

  if (c.system == SystemKind::LotkaVolterra) {
    const LotkaVolterra lv = make_lotka_volterra(c.alpha);
    const double x0 = c.x0.value_or(2.0);
    const double s0 = c.s0.value_or(2.0);
    const TrajectoryState start{0.0, s0, x0};
    o.event_header = {"crossing_value", "predicted_lower", "predicted_upper", "level",
                      "tau",            "s",               "x",               "residual",
                      "contained",      "max_V_drift"};
    if (c.event == EventKind::PreyReturn || c.event == EventKind::PredatorReturn) {
      const LvReturn r = lv_next_intersection(
          lv, x0, s0,
          c.event == EventKind::PreyReturn ? StateVariable::Prey : StateVariable::Predator,
          opts);
      o.trajectory = r.trajectory;
      const auto& e = r.trajectory.final_state;
      const auto& i = r.intersection;
      o.event_row = {i.crossing_value, i.predicted_lower, i.predicted_upper, i.level,
                     e.tau,            e.s,               e.x,               i.refinement_residual,
                     i.contained() ? 1.0 : 0.0, r.max_v_drift};
      return o;
    }
    std::optional<LevelEvent> ev;
    if (c.event == EventKind::Cycle) {
      // One full turn: back to s = s0 moving the way it left.
      const Rates r0 = rhs(lv, start);
      if (r0.ds != 0.0) {
        ev = LevelEvent{StateVariable::Prey, s0,
                        r0.ds > 0.0 ? Crossing::Rising : Crossing::Falling, 1};
      } else if (r0.dx != 0.0) {
        ev = LevelEvent{StateVariable::Predator, x0,
                        r0.dx > 0.0 ? Crossing::Rising : Crossing::Falling, 1};
      }
    }
    o.trajectory = integrate(lv, start, ev, opts);
    double drift = 0.0;
    const double v0 = lyapunov_V(lv, start);
    for (const auto& st : o.trajectory.samples) {
      drift = std::max(drift, std::fabs(lyapunov_V(lv, st) - v0));
    }
    if (c.event != EventKind::None) {
      const auto& e = o.trajectory.final_state;
      const bool hit = o.trajectory.reason == StopReason::Event;
      o.event_row = {kNaN, kNaN, kNaN, ev ? ev->level : kNaN, e.tau, e.s, e.x,
                     hit ? o.trajectory.event_residual : kNaN, kNaN, drift};
    }
    return o;
  }

  const RosenzweigMacArthur rm = make_rosenzweig_macarthur(c.m, c.lambda, c.a);
  const double s0 = c.s0.value_or(c.lambda);
  const double x0 = c.x0.value_or(1.0);
  if (c.event == EventKind::PreyReturn || c.event == EventKind::Cycle) {
    throw ConfigError("for the RM system use --event predator-return or none");
  }
  if (c.event == EventKind::PredatorReturn) {
    const RmReturn r = rm_next_intersection(rm, x0, s0, opts);
    o.trajectory = r.trajectory;
    const auto& e = r.trajectory.final_state;
    const auto& i = r.intersection;
    o.event_header = {"crossing_value", "predicted_lower", "predicted_upper", "level", "tau",
                      "s",              "x",               "residual",        "contained",
                      "preconditions_ok", "precondition_violations"};
    o.event_row = {i.crossing_value, i.predicted_lower, i.predicted_upper, i.level, e.tau,
                   e.s, e.x, i.refinement_residual, i.contained() ? 1.0 : 0.0,
                   r.preconditions.ok ? 1.0 : 0.0,
                   static_cast<double>(r.preconditions.violations)};
    return o;
  }
  o.trajectory = integrate(rm, TrajectoryState{0.0, s0, x0}, std::nullopt, opts);
  return o;
}

void write_trajectory(std::ostream& out, const IntegrationResult& tr,
                      const LotkaVolterra* lv) {
  csv::Writer w(out);
  if (lv != nullptr) {
    w.header({"tau", "s", "x", "V"});
    for (const auto& st : tr.samples) w.row({st.tau, st.s, st.x, lyapunov_V(*lv, st)});
  } else {
    w.header({"tau", "s", "x"});
    for (const auto& st : tr.samples) w.row({st.tau, st.s, st.x});
  }
}

// fig1: an LV orbit and the estimated return levels.
void figure1_panel(std::ostream& out, double x0, double s0, StateVariable estimated) {
  const LotkaVolterra lv = make_lotka_volterra(1.0);
  const TrajectoryState start{0.0, s0, x0};
  const Rates r0 = rhs(lv, start);
  const LevelEvent cycle{StateVariable::Prey, s0,
                         r0.ds > 0.0 ? Crossing::Rising : Crossing::Falling, 1};
  const IntegrationResult orbit = integrate(lv, start, cycle);
  const double v = estimated == StateVariable::Prey ? s0 : x0;
  const ReturnBounds b = lv_return_bounds(estimated, v);
  const LvReturn ret = lv_next_intersection(lv, x0, s0, estimated);
  const char* p = estimated == StateVariable::Prey ? "s" : "x";
  csv::Writer w(out);
  w.header({"tau", "s", "x", "V", std::string(p) + "_z1", std::string(p) + "_z2",
            std::string(p) + "_z0", std::string(p) + "_trivial_lo",
            std::string(p) + "_trivial_up", std::string(p) + "_return"});
  for (const auto& st : orbit.samples) {
    w.row({st.tau, st.s, st.x, lyapunov_V(lv, st), b.lower, b.upper, b.z0_upper,
           b.trivial_lower, b.trivial_upper, ret.intersection.crossing_value});
  }
}

void figure5_panel(std::ostream& out) {
  const RosenzweigMacArthur rm = make_rosenzweig_macarthur(1.0, 0.3, 0.1);
  IntegrationOptions opts;
  opts.t_max = 1e6;
  const RmReturn r = rm_next_intersection(rm, 1.0, rm.lambda, opts);
  const TrajectoryState& start = r.trajectory.samples.front();
  const double F_low = rm.a;
  const double F_up = rm.h(rm.lambda);
  csv::Writer w(out);
  w.header({"tau", "x", "s", "s_barrier_low", "s_barrier_up"});
  for (const auto& st : r.trajectory.samples) {
    w.row({st.tau, st.x, st.s, rm_barrier_prey(rm, F_low, start, st.x),
           rm_barrier_prey(rm, F_up, start, st.x)});
  }
}

std::map<std::string, EventKind> event_names() {
  return {{"prey-return", EventKind::PreyReturn},
          {"predator-return", EventKind::PredatorReturn},
          {"cycle", EventKind::Cycle},
          {"none", EventKind::None}};
}

}  // namespace

void Grid::validate() const {
  if (count < 2) throw ConfigError("grid count must be at least 2 (got " + std::to_string(count) + ")");
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
    throw ConfigError("grid needs finite min < max (got " + csv::format(min) + ", " +
                      csv::format(max) + ")");
  }
  if (spacing == Spacing::Log && !(min > 0.0)) {
    throw ConfigError("log grid needs min > 0 (got " + csv::format(min) + ")");
  }
}

std::vector<double> Grid::points() const {
  validate();
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    out[i] = spacing == Spacing::Linear ? min + (max - min) * t
                                        : min * std::exp(std::log(max / min) * t);
  }
  out.front() = min;
  out.back() = max;
  return out;
}

Grid default_bounds_grid() { return Grid{1.001, 10.0, 500, Spacing::Log}; }

Grid default_lambert_grid() { return Grid{-kInvE + 1e-6, -1e-6, 500, Spacing::Linear}; }

RunConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"Bounds for x - ln x = y - ln y, the Lambert W function and predator-prey returns"};
  app.require_subcommand(1);

  RunConfig c;
  std::optional<double> grid_min, grid_max;
  std::optional<int> grid_count;
  std::optional<std::string> grid_spacing;
  std::optional<std::uint64_t> seed;
  std::string system = "lv";
  std::string event;
  std::string figure = "all";

  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid-min", grid_min, "Grid start");
    sub->add_option("--grid-max", grid_max, "Grid end");
    sub->add_option("--grid-count", grid_count, "Number of grid points (>= 2)");
    sub->add_option("--grid-spacing", grid_spacing, "linear or log")
        ->check(CLI::IsMember({"linear", "log"}));
  };
  auto add_out = [&](CLI::App* sub, const char* help) { sub->add_option("--out", c.out, help); };

  CLI::App* bounds = app.add_subcommand("bounds", "Table of the z bounds over a y grid");
  add_grid(bounds);
  add_out(bounds, "Output CSV (default stdout)");

  CLI::App* lambert = app.add_subcommand("lambert", "Table of W and its bounds over an X grid");
  add_grid(lambert);
  add_out(lambert, "Output CSV (default stdout)");

  CLI::App* sim = app.add_subcommand("simulate", "Integrate an LV or RM trajectory");
  sim->add_option("--system", system, "lv or rm")->check(CLI::IsMember({"lv", "rm"}));
  sim->add_option("--alpha", c.alpha, "LV predator rate");
  sim->add_option("--m", c.m, "RM predator rate");
  sim->add_option("--lambda", c.lambda, "RM predator isocline");
  sim->add_option("--a", c.a, "RM half-saturation");
  sim->add_option("--x0", c.x0, "Initial predator");
  sim->add_option("--s0", c.s0, "Initial prey");
  sim->add_option("--event", event, "prey-return, predator-return, cycle or none")
      ->check(CLI::IsMember({"prey-return", "predator-return", "cycle", "none"}));
  sim->add_option("--t-max", c.t_max, "Integration time limit");
  add_out(sim, "Trajectory CSV (default stdout); events go to <stem>_events.csv");

  CLI::App* ver = app.add_subcommand("verify", "Run every invariant suite");
  ver->add_option("--seed", seed, "RNG seed (default: LVB_SEED or built-in)");
  ver->add_flag("--corrupt-coefficient", c.corrupt_coefficient,
                "Perturb one coefficient (negative control)");

  CLI::App* fig = app.add_subcommand("figure", "Write fig<N>_<panel>.csv files");
  fig->add_option("--figure", figure, "1..5 or all");
  add_out(fig, "Output directory (default .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e);
      throw HelpShown{};
    }
    throw ConfigError(e.what());
  }

  Grid grid;
  if (app.got_subcommand(bounds)) {
    c.subcommand = Subcommand::Bounds;
    grid = default_bounds_grid();
  } else if (app.got_subcommand(lambert)) {
    c.subcommand = Subcommand::Lambert;
    grid = default_lambert_grid();
  } else if (app.got_subcommand(sim)) {
    c.subcommand = Subcommand::Simulate;
  } else if (app.got_subcommand(ver)) {
    c.subcommand = Subcommand::Verify;
  } else {
    c.subcommand = Subcommand::Figure;
  }
  if (grid_min) grid.min = *grid_min;
  if (grid_max) grid.max = *grid_max;
  if (grid_count) grid.count = *grid_count;
  if (grid_spacing) grid.spacing = *grid_spacing == "log" ? Spacing::Log : Spacing::Linear;
  if (c.subcommand == Subcommand::Bounds || c.subcommand == Subcommand::Lambert) {
    grid.validate();
  }
  c.grid = grid;

  c.system = system == "rm" ? SystemKind::RosenzweigMacArthur : SystemKind::LotkaVolterra;
  if (!event.empty()) {
    c.event = event_names().at(event);
  } else {
    c.event = c.system == SystemKind::LotkaVolterra ? EventKind::Cycle
                                                    : EventKind::PredatorReturn;
  }
  if (!(c.t_max > 0.0)) throw ConfigError("--t-max must be positive");

  c.seed = seed ? *seed : seed_from_env();

  if (figure != "all") {
    char* end = nullptr;
    const long n = std::strtol(figure.c_str(), &end, 10);
    if (*end != '\0' || n < 1 || n > 5) throw ConfigError("unknown figure id " + figure);
    c.figures = {static_cast<int>(n)};
  }
  return c;
}

void run_bounds(const RunConfig& config, std::ostream& out) {
  const auto rows = evaluate<BoundsRow>(config.grid.points(), bounds_row);
  csv::Writer w(out);
  w.header(kBoundsHeader);
  for (const auto& r : rows) w.row(bounds_values(r));
}

void run_lambert(const RunConfig& config, std::ostream& out) {
  const auto rows = evaluate<LambertRow>(config.grid.points(), lambert_row);
  csv::Writer w(out);
  w.header(kLambertHeader);
  for (const auto& r : rows) w.row(lambert_values(r));
}

void run_simulate(const RunConfig& config, std::ostream& out, std::ostream& events) {
  const SimulationOutcome o = simulate(config);
  LotkaVolterra lv{config.alpha};
  write_trajectory(out, o.trajectory,
                   config.system == SystemKind::LotkaVolterra ? &lv : nullptr);
  if (!o.event_row.empty()) {
    csv::Writer w(events);
    w.header(o.event_header);
    w.row(o.event_row);
  }
}

bool run_verify(const RunConfig& config, std::ostream& out) {
  VerifyOptions opts;
  opts.seed = config.seed;
  opts.corrupt_coefficient = config.corrupt_coefficient;
  out << "seed " << opts.seed << (opts.corrupt_coefficient ? " (corrupted coefficient)" : "")
      << '\n';
  const VerifyReport report = run_invariant_suites(opts);
  report.print(out);
  return report.passed();
}

std::vector<std::filesystem::path> run_figure(const std::vector<int>& figures,
                                              const std::filesystem::path& dir) {
  std::vector<int> ids = figures.empty() ? std::vector<int>{1, 2, 3, 4, 5} : figures;
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto file = [&](const std::string& name) {
    written.push_back(dir / ("fig" + name + ".csv"));
    return open_output(written.back());
  };

  std::vector<std::vector<double>> brows;
  std::vector<std::vector<double>> lrows;
  auto bounds_table = [&]() -> const std::vector<std::vector<double>>& {
    if (brows.empty()) {
      for (double y : default_bounds_grid().points()) brows.push_back(bounds_values(bounds_row(y)));
    }
    return brows;
  };
  auto lambert_table = [&]() -> const std::vector<std::vector<double>>& {
    if (lrows.empty()) {
      for (double X : default_lambert_grid().points()) {
        lrows.push_back(lambert_values(lambert_row(X)));
      }
    }
    return lrows;
  };

  for (int id : ids) {
    switch (id) {
      case 1: {
        auto left = file("1_left");
        figure1_panel(left, 2.0, 2.0, StateVariable::Prey);
        auto right = file("1_right");
        figure1_panel(right, 2.0, 0.5, StateVariable::Predator);
        break;
      }
      case 2: {
        // Upper panels in x = z Y units so that every curve shares the axis.
        std::vector<std::vector<double>> xs;
        std::vector<std::string> names = {"y", "x_exact", "x_z1", "x_z2", "x_z0",
                                          "x_trivial_lo", "x_trivial_up", "x_s09_lo_a",
                                          "x_s09_lo_b", "x_s09_up"};
        for (const auto& r : bounds_table()) {
          const double Y = r[1];
          xs.push_back({r[0], r[2], r[4] * Y, r[5] * Y, r[6] * Y, Y, kE * Y, r[10], r[11], r[12]});
        }
        auto ul = file("2_upper_left");
        write_columns(ul, names, xs, names);
        auto ur = file("2_upper_right");
        std::vector<std::vector<double>> errs;
        for (const auto& r : xs) {
          std::vector<double> e = {r[0]};
          for (std::size_t i = 2; i < r.size(); ++i) e.push_back(relerr(r[i], r[1]));
          errs.push_back(e);
        }
        write_columns(ur,
                      {"y", "relerr_z1", "relerr_z2", "relerr_z0", "relerr_trivial_lo",
                       "relerr_trivial_up", "relerr_s09_lo_a", "relerr_s09_lo_b",
                       "relerr_s09_up"},
                      errs,
                      {"y", "relerr_z1", "relerr_z2", "relerr_z0", "relerr_trivial_lo",
                       "relerr_trivial_up", "relerr_s09_lo_a", "relerr_s09_lo_b",
                       "relerr_s09_up"});
        auto ll = file("2_lower_left");
        write_columns(ll, kLambertHeader, lambert_table(),
                      {"X", "W", "Z1", "Z2", "Z0", "hh08", "ser2", "ser3", "ser4", "ser5",
                       "ser6"});
        auto lr = file("2_lower_right");
        write_columns(lr, kLambertHeader, lambert_table(),
                      {"X", "relerr_Z1", "relerr_Z2", "relerr_Z0", "relerr_hh08",
                       "relerr_ser2", "relerr_ser3", "relerr_ser4", "relerr_ser5",
                       "relerr_ser6"});
        break;
      }
      case 3: {
        auto left = file("3_left");
        write_columns(left, kBoundsHeader, bounds_table(),
                      {"y", "relerr_tz1", "relerr_tz2", "relerr_tz3", "relerr_z1",
                       "relerr_z2", "relerr_s09_lo_a", "relerr_s09_lo_b", "relerr_s09_up"});
        auto right = file("3_right");
        write_columns(right, kLambertHeader, lambert_table(),
                      {"X", "relerr_TZ1", "relerr_TZ2", "relerr_TZ3", "relerr_Z1",
                       "relerr_Z2", "relerr_hh08", "relerr_ser2", "relerr_ser3",
                       "relerr_ser4", "relerr_ser5", "relerr_ser6"});
        break;
      }
      case 4: {
        auto main = file("4_main");
        csv::Writer w(main);
        w.header({"X", "W"});
        for (double X : Grid{-kInvE, 3.0, 1000, Spacing::Linear}.points()) {
          w.row({X, lambert_w(X)});
        }
        break;
      }
      case 5: {
        auto main = file("5_main");
        figure5_panel(main);
        break;
      }
      default:
        throw ConfigError("unknown figure id " + std::to_string(id));
    }
  }
  return written;
}

int run_main(int argc, const char* const* argv) {
  try {
    const RunConfig c = parse_args(argc, argv);
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (c.out && c.subcommand != Subcommand::Figure) {
      file = open_output(*c.out);
      out = &file;
    }
    switch (c.subcommand) {
      case Subcommand::Bounds:
        run_bounds(c, *out);
        break;
      case Subcommand::Lambert:
        run_lambert(c, *out);
        break;
      case Subcommand::Simulate: {
        if (c.out) {
          std::filesystem::path p(*c.out);
          std::filesystem::path ev = p.parent_path() / (p.stem().string() + "_events.csv");
          std::ofstream events = open_output(ev);
          run_simulate(c, *out, events);
        } else {
          run_simulate(c, *out, std::cerr);
        }
        break;
      }
      case Subcommand::Verify:
        if (!run_verify(c, *out)) return static_cast<int>(ExitCode::VerifyFailed);
        break;
      case Subcommand::Figure:
        for (const auto& p : run_figure(c.figures, c.out.value_or("."))) {
          std::cout << p.string() << '\n';
        }
        break;
    }
    return static_cast<int>(ExitCode::Ok);
  } catch (const HelpShown&) {
    return static_cast<int>(ExitCode::Ok);
  } catch (const IntegrationError& e) {
    std::cerr << "integration error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Integration);
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Integration);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Config);
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Config);
  }
}

}  // namespace lvb::cli
