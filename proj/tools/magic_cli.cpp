// Command-line front end.
//
// Exit codes: 0 yes / success, 1 no / check failed, 2 bad input or I/O,
// 3 undecided (solver could not certify either answer).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "magic/magic.hpp"

using namespace magic;

namespace {

enum Exit : int { kYes = 0, kNo = 1, kBadInput = 2, kUndecided = 3 };

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return kYes;
    case Verdict::Infeasible: return kNo;
    case Verdict::Undecided: return kUndecided;
  }
  return kUndecided;
}

void print(const io::json& j) { std::cout << j.dump(2) << '\n'; }

template <class Rows>
void emit_csv(const std::string& path, const Rows& rows) {
  if (path.empty() || path == "-") {
    figures::write_csv(std::cout, rows);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  figures::write_csv(out, rows);
}

int cmd_is_stabilizer(const std::string& state) {
  const DensityMatrix rho = io::named_state(state);
  const StabilizerReport r = is_stabilizer(rho);
  print(io::to_json(r));
  return r.stabilizer ? kYes : kNo;
}

int cmd_negativity(const std::string& state) {
  const DensityMatrix rho = io::named_state(state);
  const WignerTable w = wigner(rho);
  print({{"wigner", io::to_json(w)}, {"sum_negativity", w.negativity()}});
  return kYes;
}

int cmd_convert(const std::string& from, const std::string& to, const std::string& out,
                const std::string& dump) {
  const DensityMatrix rho = io::named_state(from);
  const DensityMatrix rhop = io::named_state(to);
  if (!dump.empty()) io::write_json_file(dump, sdp::to_json(build_conversion_sdp(rho, rhop).problem));
  const ConversionResult r = check_conversion(rho, rhop);
  print(io::to_json(r));
  if (r.choi && !out.empty()) io::write_json_file(out, io::to_json(io::document(*r.choi)));
  return exit_code(r.verdict);
}

int cmd_monotone(const std::string& sigma, double t, const std::string& state) {
  const DensityMatrix s = io::named_state(sigma);
  const DensityMatrix rho = io::named_state(state);
  if (t < 0) throw InvariantViolation("--t must be >= 0");
  print(io::to_json(monotone(s, t, rho)));
  return kYes;
}

int cmd_figures(int fig, const std::string& out, int resolution, double step,
                const std::vector<double>& t_values, unsigned threads) {
  if (fig == 2) {
    emit_csv(out, figures::figure2_grid(resolution, threads));
  } else {
    emit_csv(out, figures::figure3_scan(t_values, figures::default_alpha_grid(step), threads));
  }
  return kYes;
}

int cmd_scan_threshold(const std::string& sigma, const std::vector<double>& t_values,
                       double step, const std::string& out, unsigned threads) {
  const DensityMatrix s = io::named_state(sigma);
  emit_csv(out, figures::threshold_scan(s, t_values, figures::default_alpha_grid(step), 1e-5,
                                        threads));
  return kYes;
}

int cmd_verify_appendix() {
  struct Row {
    std::string name;
    std::string value;
    bool ok;
  };
  std::vector<Row> rows;
  auto num = [](double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
  };
  const auto t0 = std::chrono::steady_clock::now();
  const DensityMatrix rho = appendix::rho();
  const DensityMatrix rhop = appendix::rho_prime();

  const double n0 = sum_negativity(rho), n1 = sum_negativity(rhop);
  rows.push_back({"sum negativity of rho = 0", num(n0), std::abs(n0) <= 1e-6});
  rows.push_back({"sum negativity of rho' = 0.0074", num(n1), std::abs(n1 - 0.0074) <= 5e-4});

  const ConversionResult conv = check_conversion(rho, rhop);
  rows.push_back({"conversion SDP verdict", to_string(conv.verdict),
                  conv.verdict == Verdict::Feasible});
  if (conv.choi) {
    const SpoReport r = verify_spo(*conv.choi);
    rows.push_back({"solver Choi passes SPO checks (1e-8)", r.clean() ? "clean" : "violations",
                    r.clean()});
    rows.push_back({"solver Choi maps rho to rho' (1e-6)", num(conv.map_error),
                    conv.map_error <= 1e-6});
  }

  const double pt = tol::printed_matrix;
  const CMatrix j = appendix::choi();
  const SpoReport pr = verify_spo(j, 3, 3, {pt, pt, pt});
  rows.push_back({"printed J passes SPO checks (5e-3)", pr.clean() ? "clean" : "violations",
                  pr.clean()});
  const double err = max_abs(apply_choi(j, 3, 3, rho.matrix()) - rhop.matrix());
  rows.push_back({"printed J maps rho to rho' (5e-3)", num(err), err <= pt});

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool all = true;
  for (const auto& r : rows) {
    std::printf("%-4s  %-40s  %s\n", r.ok ? "PASS" : "FAIL", r.name.c_str(), r.value.c_str());
    all = all && r.ok;
  }
  std::printf("elapsed %.1f s\n", secs);
  return all ? kYes : kNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magic-state conversion under stabilizer-preserving operations"};
  app.require_subcommand(1);

  std::string state, from, to, out, sigma = "zero", dump;
  double t = 1.0, step = 0.01;
  int fig = 3, resolution = 21;
  unsigned threads = 0;
  std::vector<double> t_values = figures::default_t_values();
  std::vector<double> threshold_t{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0};

  auto* is_stab = app.add_subcommand("is-stabilizer", "Facet test for the stabilizer polytope");
  is_stab->add_option("--state", state, "State file or name (T, H, mixed[:d], zero[:d])")->required();

  auto* neg = app.add_subcommand("negativity", "Wigner table and sum negativity (odd prime d)");
  neg->add_option("--state", state, "State file or name")->required();

  auto* conv = app.add_subcommand("convert", "Decide convertibility rho -> rho'");
  conv->add_option("--from", from, "Input state")->required();
  conv->add_option("--to", to, "Target state")->required();
  conv->add_option("--out", out, "Write the converting Choi matrix here");
  conv->add_option("--dump-sdp", dump, "Write the conversion SDP as JSON");

  auto* mono = app.add_subcommand("monotone", "Evaluate M_{sigma,t}(rho)");
  mono->add_option("--sigma", sigma, "Parameter state sigma")->required();
  mono->add_option("--t", t, "Parameter t >= 0")->required();
  mono->add_option("--state", state, "State rho")->required();

  auto* figs = app.add_subcommand("figures", "Monotone scans as CSV");
  figs->add_option("--fig", fig, "2 (equatorial disk) or 3 (T-line)")
      ->required()
      ->check(CLI::IsMember({2, 3}));
  figs->add_option("--out", out, "CSV path (default stdout)");
  figs->add_option("--resolution", resolution, "Grid points per axis (figure 2)");
  figs->add_option("--step", step, "Alpha step (figure 3)");
  figs->add_option("--t", t_values, "t values (figure 3)");
  figs->add_option("--threads", threads, "Worker threads (0 = hardware)");

  app.add_subcommand("verify-appendix", "Reproduce the worked qutrit example");

  auto* scan = app.add_subcommand("scan-threshold",
                                  "First alpha with M > 1e-5 on the T-line, per t");
  scan->add_option("--sigma", sigma, "Parameter state sigma (qubit)");
  scan->add_option("--t", threshold_t, "t values");
  scan->add_option("--step", step, "Alpha step");
  scan->add_option("--out", out, "CSV path (default stdout)");
  scan->add_option("--threads", threads, "Worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kBadInput;
  }

  try {
    if (*is_stab) return cmd_is_stabilizer(state);
    if (*neg) return cmd_negativity(state);
    if (*conv) return cmd_convert(from, to, out, dump);
    if (*mono) return cmd_monotone(sigma, t, state);
    if (*figs) return cmd_figures(fig, out, resolution, step, t_values, threads);
    if (*scan) return cmd_scan_threshold(sigma, threshold_t, step, out, threads);
    return cmd_verify_appendix();
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUndecided;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  }
}
