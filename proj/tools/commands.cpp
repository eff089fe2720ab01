#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <fmt/format.h>

#include "artifacts.hpp"
#include "subscat/subscat.h"

namespace subscat::cli {

namespace {

using BarrierPtr = std::unique_ptr<subscat_barrier, decltype(&subscat_barrier_free)>;
using EvolutionPtr = std::unique_ptr<subscat_evolution, decltype(&subscat_evolution_free)>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBranchTolerance = 1e-8;
constexpr double kReflectionFloor = 1e-12;
constexpr int kMaxDoublings = 3;

int exit_code_of(int status) {
  switch (status) {
    case SUBSCAT_DOMAIN:
      return kConfigError;
    case SUBSCAT_NUMERICAL:
    case SUBSCAT_AMBIGUOUS:
    case SUBSCAT_UNDEFINED:
      return kNumericalFailure;
    default:
      return kInternalError;
  }
}

void check(int status, const std::string& context) {
  if (status != SUBSCAT_OK) throw CommandError(exit_code_of(status), context + ": " + subscat_last_error());
}

BarrierPtr make_barrier(const BarrierConfig& cfg) {
  subscat_barrier* raw = nullptr;
  int status = SUBSCAT_OK;
  if (cfg.kind == "rectangular") {
    status = subscat_barrier_rectangular(cfg.a, cfg.b, cfg.height, &raw);
  } else {
    std::vector<double> w, h;
    for (const auto& p : cfg.profile) {
      w.push_back(p.width);
      h.push_back(p.height);
    }
    status = cfg.kind == "symmetric" ? subscat_barrier_symmetric(cfg.a, w.data(), h.data(), w.size(), &raw)
                                     : subscat_barrier_segments(cfg.a, w.data(), h.data(), w.size(), &raw);
  }
  check(status, "[barrier]");
  return {raw, &subscat_barrier_free};
}

subscat_packet packet_of(const PacketConfig& p, std::size_t k_points) { return {p.x0, p.sigma, p.k0, k_points}; }

EvolutionPtr make_evolution(const subscat_barrier* bar, const subscat_packet& packet) {
  subscat_evolution* raw = nullptr;
  check(subscat_evolution_create(bar, &packet, &raw), "[packet]");
  return {raw, &subscat_evolution_free};
}

std::vector<double> k_grid(const RunParams& run) {
  std::vector<double> ks(run.k_count);
  for (std::size_t i = 0; i < run.k_count; ++i)
    ks[i] = run.k_count == 1 ? run.k_min
                             : run.k_min + (run.k_max - run.k_min) * static_cast<double>(i) /
                                               static_cast<double>(run.k_count - 1);
  return ks;
}

Json packet_json(const subscat_evolution_info& info, std::size_t k_points) {
  return {{"k_points", k_points},          {"k_nodes", info.k_nodes},       {"dk", info.dk},
          {"raw_norm", info.raw_norm},     {"negative_fraction", info.negative_fraction},
          {"tail_ratio", info.tail_ratio}, {"transmission", info.transmission},
          {"reflection", info.reflection}};
}

Json complex_json(double re, double im) { return {{"re", re}, {"im", im}}; }

}  // namespace

int cmd_solve(const RunConfig& cfg, const CommandOptions& opt) {
  const RunInfo info{"solve", opt.profile, &cfg};
  const auto bar = make_barrier(cfg.barrier);
  std::vector<std::string> cols{"k", "re_a_t", "im_a_t", "re_a_r", "im_a_r", "T", "R", "unitarity_residual"};
  if (opt.oracle) {
    cols.push_back("numerov_T");
    cols.push_back("numerov_amplitude_diff");
  }
  CsvWriter csv(opt.out / "solve.csv", info, cols);
  double worst = 0.0, worst_oracle = 0.0;
  for (double k : k_grid(cfg.run)) {
    subscat_amplitudes a;
    check(subscat_solve(bar.get(), k, &a), fmt::format("solve at k = {}", k));
    std::vector<double> row{k, a.t_re, a.t_im, a.r_re, a.r_im, a.transmission, a.reflection, a.unitarity_residual};
    worst = std::max(worst, a.unitarity_residual);
    if (opt.oracle) {
      subscat_amplitudes n;
      check(subscat_numerov(bar.get(), k, cfg.run.points_per_wavelength, &n), fmt::format("numerov at k = {}", k));
      const double diff = std::max(std::hypot(n.t_re - a.t_re, n.t_im - a.t_im), std::hypot(n.r_re - a.r_re, n.r_im - a.r_im));
      worst_oracle = std::max(worst_oracle, diff);
      row.push_back(n.transmission);
      row.push_back(diff);
    }
    csv.row(row);
  }
  csv.save();

  const bool unitary = worst <= cfg.tolerances.unitarity;
  const bool oracle_ok = !opt.oracle || worst_oracle <= cfg.tolerances.numerov;
  Json doc;
  doc["metadata"] = metadata(info);
  doc["table"] = "solve.csv";
  doc["max_unitarity_residual"] = worst;
  doc["oracle"] = opt.oracle ? Json{{"method", "numerov"},
                                    {"points_per_wavelength", cfg.run.points_per_wavelength},
                                    {"max_amplitude_diff", worst_oracle},
                                    {"pass", oracle_ok}}
                             : Json(nullptr);
  doc["pass"] = unitary && oracle_ok;
  write_json(opt.out / "solve.json", doc);
  return unitary && oracle_ok ? kOk : kNumericalFailure;
}

int cmd_decompose(const RunConfig& cfg, const CommandOptions& opt) {
  const RunInfo info{"decompose", opt.profile, &cfg};
  const auto bar = make_barrier(cfg.barrier);
  CsvWriter csv(opt.out / "decompose.csv", info,
                {"k", "re_a_tr_in", "im_a_tr_in", "re_a_ref_in", "im_a_ref_in", "re_a_ref_r", "im_a_ref_r", "T", "R",
                 "selected_at_center", "rejected_at_center", "propagation_mismatch", "sum_residual",
                 "modulus_residual", "re_ref_in_minus_R", "status"});
  std::size_t failures = 0, degenerate = 0;
  double worst_sum = 0.0, worst_modulus = 0.0, worst_re = 0.0, worst_center = 0.0;
  std::vector<std::string> problems;
  for (double k : k_grid(cfg.run)) {
    subscat_decomposition d;
    const int status = subscat_decompose(bar.get(), k, &d);
    if (status == SUBSCAT_AMBIGUOUS || status == SUBSCAT_NUMERICAL) {
      ++failures;
      problems.push_back(fmt::format("k = {}: {}", k, subscat_last_error()));
      std::vector<double> row(15, kNaN);
      row[0] = k;
      csv.row(row, {status == SUBSCAT_AMBIGUOUS ? "ambiguous" : "numerical"});
      continue;
    }
    check(status, fmt::format("decompose at k = {}", k));
    const double re_gap = std::abs(d.a_ref_in_re - d.reflection);
    worst_sum = std::max(worst_sum, d.sum_residual);
    worst_modulus = std::max(worst_modulus, d.modulus_residual);
    worst_re = std::max(worst_re, re_gap);
    worst_center = std::max(worst_center, d.selected_at_center);
    degenerate += d.degenerate != 0;
    csv.row({k, d.a_tr_in_re, d.a_tr_in_im, d.a_ref_in_re, d.a_ref_in_im, d.a_ref_r_re, d.a_ref_r_im, d.transmission,
             d.reflection, d.selected_at_center, d.rejected_at_center, d.propagation_mismatch, d.sum_residual,
             d.modulus_residual, re_gap},
            {d.degenerate ? "degenerate" : "ok"});
  }
  csv.save();

  const Tolerances& t = cfg.tolerances;
  const bool pass = failures == 0 && worst_sum <= t.decomposition && worst_modulus <= t.decomposition &&
                    worst_re <= t.unitarity && worst_center <= kBranchTolerance;
  Json doc;
  doc["metadata"] = metadata(info);
  doc["table"] = "decompose.csv";
  doc["rows"] = cfg.run.k_count;
  doc["degenerate_rows"] = degenerate;
  doc["failed_rows"] = failures;
  doc["max_sum_residual"] = worst_sum;
  doc["max_modulus_residual"] = worst_modulus;
  doc["max_re_ref_in_minus_R"] = worst_re;
  doc["max_selected_at_center"] = worst_center;
  doc["problems"] = problems;
  doc["oracle"] = opt.oracle ? Json("not applicable to decompose") : Json(nullptr);
  doc["pass"] = pass;
  write_json(opt.out / "decompose.json", doc);
  return pass ? kOk : kNumericalFailure;
}

int cmd_evolve(const RunConfig& cfg, const CommandOptions& opt) {
  const RunInfo info{"evolve", opt.profile, &cfg};
  const auto bar = make_barrier(cfg.barrier);
  const auto& times = cfg.run.times;
  double t_max = 0.0;
  for (double t : times) t_max = std::max(t_max, std::abs(t));

  // Build the evolution, doubling the k-grid while it aliases at any sample time.
  std::size_t k_points = cfg.packet->k_points;
  std::vector<std::string> notes;
  EvolutionPtr ev{nullptr, &subscat_evolution_free};
  subscat_grid grid{};
  double max_drift = 0.0;
  for (int doublings = 0;; ++doublings) {
    ev = make_evolution(bar.get(), packet_of(*cfg.packet, k_points));
    check(subscat_evolution_grid(ev.get(), t_max, cfg.run.dx, &grid), "[run] dx");
    bool aliased = false;
    max_drift = 0.0;
    for (double t : times) {
      double drift = 0.0;
      const int status = subscat_evolution_check_resolution(ev.get(), t, &grid, &drift);
      max_drift = std::max(max_drift, drift);
      if (status == SUBSCAT_NUMERICAL) {
        aliased = true;
        notes.push_back(fmt::format("k_points = {}: {}", k_points, subscat_last_error()));
        break;
      }
      check(status, fmt::format("resolution check at t = {}", t));
    }
    if (!aliased) break;
    if (doublings == kMaxDoublings)
      throw CommandError(kNumericalFailure, fmt::format("k-grid still aliases after {} doublings (k_points = {})",
                                                        kMaxDoublings, k_points));
    k_points *= 2;
  }
  subscat_evolution_info ei;
  check(subscat_evolution_info_get(ev.get(), &ei), "evolution info");

  const Tolerances& tol = cfg.tolerances;
  Json snaps = Json::array();
  bool pass = true;
  double t_lo = std::numeric_limits<double>::infinity(), t_hi = -t_lo;
  std::vector<double> buf[6];
  for (auto& b : buf) b.resize(grid.points);
  for (std::size_t i = 0; i < times.size(); ++i) {
    subscat_snapshot_scalars s;
    const int status = subscat_evolution_snapshot(ev.get(), times[i], &grid, buf[0].data(), buf[1].data(),
                                                  buf[2].data(), buf[3].data(), buf[4].data(), buf[5].data(), &s);
    const std::string file = fmt::format("snapshot_{:04d}.csv", i);
    Json entry{{"t", times[i]}, {"file", file}};
    std::vector<std::string> violations;
    if (status == SUBSCAT_NUMERICAL) {
      violations.push_back(subscat_last_error());
    } else {
      check(status, fmt::format("snapshot at t = {}", times[i]));
      entry["norm_full"] = s.norm;
      entry["T_t"] = s.transmitted;
      entry["R_t"] = s.reflected;
      entry["overlap_re"] = s.overlap_re;
      entry["overlap_im"] = s.overlap_im;
      t_lo = std::min(t_lo, s.transmitted);
      t_hi = std::max(t_hi, s.transmitted);
      if (std::abs(s.norm - 1.0) > tol.norm) violations.push_back(fmt::format("|norm - 1| = {:.3g}", std::abs(s.norm - 1.0)));
      if (std::abs(s.transmitted + s.reflected - 1.0) > tol.sum)
        violations.push_back(fmt::format("|T_t + R_t - 1| = {:.3g}", std::abs(s.transmitted + s.reflected - 1.0)));
      if (std::abs(s.overlap_re) > tol.overlap)
        violations.push_back(fmt::format("|Re <psi_tr|psi_ref>| = {:.3g}", std::abs(s.overlap_re)));
      CsvWriter csv(opt.out / file, info,
                  {"x", "abs2_full", "abs2_tr", "abs2_ref", "full_re", "full_im", "tr_re", "tr_im", "ref_re", "ref_im"},
                    {fmt::format("t {}", format_number(times[i]))});
      for (std::size_t p = 0; p < grid.points; ++p)
        csv.row({grid.origin + grid.dx * static_cast<double>(p), std::hypot(buf[0][p], buf[1][p]) * std::hypot(buf[0][p], buf[1][p]),
                 std::hypot(buf[2][p], buf[3][p]) * std::hypot(buf[2][p], buf[3][p]),
                 std::hypot(buf[4][p], buf[5][p]) * std::hypot(buf[4][p], buf[5][p]), buf[0][p], buf[1][p], buf[2][p],
                 buf[3][p], buf[4][p], buf[5][p]});
      csv.save();
    }
    pass = pass && violations.empty();
    entry["violations"] = violations;
    snaps.push_back(entry);
  }
  const double spread = times.size() > 1 && std::isfinite(t_lo) ? t_hi - t_lo : 0.0;
  const bool constant = spread <= tol.sum;
  pass = pass && constant;

  Json oracle(nullptr);
  if (opt.oracle) {
    if (times.size() < 2) {
      oracle = "needs at least two sample times";
    } else {
      constexpr std::size_t kCheckpoints = 4;
      std::vector<double> ct(kCheckpoints), l2(kCheckpoints);
      check(subscat_evolution_oracle_compare(ev.get(), times.front(), times.back(), cfg.run.oracle_dx,
                                             cfg.run.oracle_dt, kCheckpoints, ct.data(), l2.data()),
            "crank-nicolson oracle");
      const double worst = *std::max_element(l2.begin(), l2.end());
      oracle = {{"method", "crank-nicolson"}, {"dx", cfg.run.oracle_dx}, {"dt", cfg.run.oracle_dt},
                {"times", ct},                 {"l2", l2},                 {"max_l2", worst},
                {"pass", worst <= tol.oracle_l2}};
      pass = pass && worst <= tol.oracle_l2;
    }
  }

  Json doc;
  doc["metadata"] = metadata(info);
  doc["packet"] = packet_json(ei, k_points);
  doc["k_grid_notes"] = notes;
  doc["grid"] = {{"origin", grid.origin}, {"dx", grid.dx}, {"points", grid.points}};
  doc["max_aliasing_drift"] = max_drift;
  doc["snapshots"] = snaps;
  doc["transmitted_spread"] = spread;
  doc["transmitted_constant"] = constant;
  doc["oracle"] = oracle;
  doc["pass"] = pass;
  write_json(opt.out / "evolve.json", doc);
  return pass ? kOk : kNumericalFailure;
}

namespace {

Json larmor_json(const subscat_larmor_result& r) {
  return {{"norm", r.norm},
          {"routeA", r.route_a},
          {"routeB",
           {{"printed", complex_json(r.route_b_printed_re, r.route_b_printed_im)}, {"squared", r.route_b_squared}}},
          {"weight_norm",
           {{"printed", complex_json(r.weight_norm_printed_re, r.weight_norm_printed_im)},
            {"squared", r.weight_norm_squared}}},
          {"window", {r.t_lo, r.t_hi}},
          {"tail", r.tail},
          {"evaluations", r.evaluations},
          {"monotone", r.monotone != 0}};
}

}  // namespace

int cmd_times(const RunConfig& cfg, const CommandOptions& opt) {
  const RunInfo info{"times", opt.profile, &cfg};
  const auto bar = make_barrier(cfg.barrier);
  const auto ev = make_evolution(bar.get(), packet_of(*cfg.packet, cfg.packet->k_points));
  subscat_evolution_info ei;
  check(subscat_evolution_info_get(ev.get(), &ei), "evolution info");
  subscat_barrier_info bi;
  check(subscat_barrier_describe(bar.get(), &bi), "barrier info");

  std::vector<double> ks(ei.k_nodes), dwell_tr(ei.k_nodes), dwell_ref(ei.k_nodes);
  check(subscat_evolution_ks(ev.get(), ks.data()), "k-grid");
  check(subscat_evolution_dwell_table(ev.get(), SUBSCAT_TRANSMISSION, dwell_tr.data()), "dwell table (transmission)");
  check(subscat_evolution_dwell_table(ev.get(), SUBSCAT_REFLECTION, dwell_ref.data()), "dwell table (reflection)");

  std::vector<double> delay(ks.size()), traversal(ks.size()), ref_delay(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    subscat_phase_time p;
    const int status = subscat_phase_time_at(bar.get(), ks[i], &p);
    if (status == SUBSCAT_NUMERICAL || status == SUBSCAT_UNDEFINED) {
      delay[i] = traversal[i] = ref_delay[i] = kNaN;
      continue;
    }
    check(status, fmt::format("phase time at k = {}", ks[i]));
    delay[i] = p.transmission_delay;
    traversal[i] = p.traversal;
    ref_delay[i] = p.reflection_delay;
  }

  subscat_larmor_result tr;
  check(subscat_larmor_time(ev.get(), SUBSCAT_TRANSMISSION, nullptr, &tr), "Larmor time (transmission)");
  const Tolerances& tol = cfg.tolerances;
  bool pass = tr.residual_squared <= tol.route && tr.monotone;
  Json residuals{{"tr", {{"printed", tr.residual_printed}, {"squared", tr.residual_squared}}}};
  Json ref_json(nullptr), ref_barrier(nullptr);
  if (ei.reflection > kReflectionFloor) {
    subscat_larmor_result ref;
    check(subscat_larmor_time(ev.get(), SUBSCAT_REFLECTION, nullptr, &ref), "Larmor time (reflection)");
    ref_json = larmor_json(ref);
    residuals["ref"] = {{"printed", ref.residual_printed}, {"squared", ref.residual_squared}};
    pass = pass && ref.residual_squared <= tol.route && ref.monotone;

    subscat_time_options whole{};
    whole.has_domain = 1;
    whole.x_lo = bi.a;
    whole.x_hi = bi.b;
    subscat_larmor_result over;
    check(subscat_larmor_time(ev.get(), SUBSCAT_REFLECTION, &whole, &over), "Larmor time (reflection, [a, b])");
    ref_barrier = over.route_a;
  }

  CsvWriter csv(opt.out / "times.csv", info,
                {"k", "tau_dwell_tr", "tau_dwell_ref", "phase_delay_tr", "phase_traversal_tr", "phase_delay_ref"});
  for (std::size_t i = 0; i < ks.size(); ++i)
    csv.row({ks[i], dwell_tr[i], dwell_ref[i], delay[i], traversal[i], ref_delay[i]});
  csv.save();

  Json doc;
  doc["metadata"] = metadata(info);
  doc["packet"] = packet_json(ei, cfg.packet->k_points);
  doc["quadrature"] = {{"dwell", "adaptive Gauss-Kronrod (31), relative tolerance 1e-8"},
                       {"routeA_time", "adaptive Simpson, relative tolerance 1e-8, window threshold 1e-10"},
                       {"routeA_space", "composite Gauss-Legendre (20), split at segment edges and x_c"},
                       {"routeB", "trapezoid over the packet k-grid"},
                       {"phase", "fourth-order central differences in E with one Richardson step"}};
  doc["tau_dwell_tr"] = {{"k", ks}, {"tau", dwell_tr}};
  doc["tau_dwell_ref"] = {{"k", ks}, {"tau", dwell_ref}};
  doc["tau_L_tr"] = larmor_json(tr);
  doc["tau_L_ref"] = ref_json;
  doc["tau_L_ref_over_barrier"] = ref_barrier;
  doc["tau_phase"] = {{"k", ks}, {"transmission_delay", delay}, {"traversal", traversal}, {"reflection_delay", ref_delay}};
  doc["residuals"] = residuals;
  doc["table"] = "times.csv";
  doc["pass"] = pass;
  write_json(opt.out / "times.json", doc);
  return pass ? kOk : kNumericalFailure;
}

int cmd_larmor(const RunConfig& cfg, const CommandOptions& opt) {
  const RunInfo info{"larmor", opt.profile, &cfg};
  const auto bar = make_barrier(cfg.barrier);
  const PacketConfig& pc = *cfg.packet;
  const subscat_packet packet = packet_of(pc, pc.k_points);
  check(subscat_packet_validate(bar.get(), &packet, nullptr), "[packet]");

  const double e0 = 0.5 * pc.k0 * pc.k0;
  std::vector<double> omegas;
  for (double w : cfg.run.omega_ladder) omegas.push_back(w * e0);

  Json doc;
  doc["metadata"] = metadata(info);
  doc["omega_ladder"] = {{"E0", e0}, {"relative", cfg.run.omega_ladder}, {"absolute", omegas}};

  std::vector<subscat_clock_reading> readings(omegas.size());
  subscat_clock_result res;
  const int status = subscat_clock(bar.get(), &packet, omegas.data(), omegas.size(), readings.data(), &res);
  if (status == SUBSCAT_NUMERICAL) {
    doc["error"] = subscat_last_error();
    doc["pass"] = false;
    write_json(opt.out / "larmor.json", doc);
    throw CommandError(kNumericalFailure, std::string("larmor: ") + subscat_last_error());
  }
  check(status, "larmor");

  Json rows = Json::array();
  for (const auto& r : readings)
    rows.push_back({{"omega", r.omega}, {"theta_T", r.theta_t}, {"theta_R", r.theta_r}, {"tau_T", r.tau_t},
                    {"tau_R", r.tau_r}, {"sz_T", r.sz_t}, {"sz_R", r.sz_r}, {"inplane_T", r.inplane_t},
                    {"inplane_R", r.inplane_r}});
  doc["readings"] = rows;
  auto extrap = [](double v, double e, int stable, int contracting, double change) {
    return Json{{"value", v}, {"error", e}, {"stable", stable != 0}, {"contracting", contracting != 0},
                {"largest_relative_change", change}};
  };
  doc["extrapolated"] = {
      {"tau_clock_tr", extrap(res.tau_tr, res.error_tr, res.stable_tr, res.contracting_tr, res.largest_change_tr)},
      {"tau_clock_ref",
       extrap(res.tau_ref, res.error_ref, res.stable_ref, res.contracting_ref, res.largest_change_ref)}};
  doc["perturbative_warning"] = res.perturbative_warning != 0;

  // Comparison with the Larmor times of the times module and the phase time at k0.
  const auto ev = make_evolution(bar.get(), packet);
  subscat_evolution_info ei;
  check(subscat_evolution_info_get(ev.get(), &ei), "evolution info");
  subscat_larmor_result tl;
  check(subscat_larmor_time(ev.get(), SUBSCAT_TRANSMISSION, nullptr, &tl), "Larmor time (transmission)");
  Json cmp{{"tau_L_tr", tl.route_b_squared},
           {"tau_L_tr_routeA", tl.route_a},
           {"relative_difference_tr", std::abs(res.tau_tr - tl.route_b_squared) / std::abs(tl.route_b_squared)},
           {"agrees_within_5_percent_tr", std::abs(res.tau_tr - tl.route_b_squared) <= 0.05 * std::abs(tl.route_b_squared)}};
  if (ei.reflection > kReflectionFloor && std::isfinite(res.tau_ref)) {
    subscat_larmor_result rl;
    check(subscat_larmor_time(ev.get(), SUBSCAT_REFLECTION, nullptr, &rl), "Larmor time (reflection)");
    cmp["tau_L_ref"] = rl.route_b_squared;
    cmp["relative_difference_ref"] = std::abs(res.tau_ref - rl.route_b_squared) / std::abs(rl.route_b_squared);
  }
  subscat_phase_time pt;
  if (subscat_phase_time_at(bar.get(), pc.k0, &pt) == SUBSCAT_OK) cmp["tau_phase_traversal_k0"] = pt.traversal;
  doc["comparison"] = cmp;

  const bool pass = res.error_tr <= cfg.tolerances.clock * std::abs(res.tau_tr);
  doc["pass"] = pass;
  write_json(opt.out / "larmor.json", doc);
  return pass ? kOk : kNumericalFailure;
}

}  // namespace subscat::cli
