// prill: certify the degree-36 tower over a genus-2 curve.
//
//   prill certify --branch-points 0,1,2,3,4,6 --out cert.json --dot tower.dot
//   prill hesse
//   prill diagram --seed 7
//
// Exit status: 0 certified, 1 certificate FAILED, 2 degenerate input,
// 3 tracking failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "prill/pipeline.hpp"

namespace {

using namespace prill;

struct RunConfig {
  std::string branch_points = "0,1,2,3,4,6";
  std::string w5_sign = "+";
  unsigned precision_bits = 212;
  unsigned max_precision_bits = 848;
  std::optional<std::uint64_t> seed;
  std::string out = "cert.json";
  std::string dot = "tower.dot";
};

TowerInput parse_input(const RunConfig& cfg, bool branch_points_given) {
  const int sign = cfg.w5_sign == "-" ? -1 : 1;
  if (cfg.seed && !branch_points_given) return random_input(*cfg.seed, sign);
  TowerInput in;
  in.w5_sign = sign;
  std::vector<std::string> parts;
  std::stringstream ss(cfg.branch_points);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 6) throw std::invalid_argument("expected 6 branch points, got " + std::to_string(parts.size()));
  for (std::size_t k = 0; k < 6; ++k) in.branch_points[k] = parse_exact_complex(parts[k]);
  return in;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

int certify_command(const RunConfig& cfg, bool branch_points_given, bool diagram_only) {
  const TowerInput in = parse_input(cfg, branch_points_given);
  BuildOptions opt;
  opt.precision_bits = cfg.precision_bits;
  opt.max_precision_bits = std::max(cfg.max_precision_bits, cfg.precision_bits);
  std::cerr << "branch points:";
  for (const auto& b : in.branch_points) std::cerr << ' ' << b.to_string();
  std::cerr << "  (w5 " << (in.w5_sign > 0 ? '+' : '-') << ")\n";

  const TowerModel tower = build_tower(in, opt);
  const std::string dot = emit_diagram(tower);
  if (diagram_only) {
    if (cfg.dot == "-") {
      std::cout << dot;
    } else {
      write_file(cfg.dot, dot);
    }
    return 0;
  }
  const Certificate cert = certify(tower);
  write_file(cfg.out, certificate_text(tower, cert));
  if (!cfg.dot.empty()) write_file(cfg.dot, dot);
  for (const auto& v : cert.verdicts) std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << '\n';
  std::cout << (cert.passed ? "CERTIFIED" : "FAILED") << '\n';
  return cert.passed ? 0 : 1;
}

int hesse_command() {
  const HesseResult h = hesse_isotriviality_check();
  std::cout << "images of the base locus under projection from [1:-1:0]:\n";
  for (std::size_t k = 0; k < h.images.size(); ++k) {
    const auto& p = h.images[k];
    std::cout << "  " << (p.is_infinity() ? std::string("inf") : (p.x / p.z).to_string()) << "  (x"
              << h.image_multiplicity[k] << ")\n";
  }
  std::cout << "lambda = " << h.lambda << "\nj = " << h.j << '\n';
  return h.j.is_zero() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify the degree-36 etale tower over a genus-2 curve"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--branch-points", cfg.branch_points, "six comma-separated values, e.g. 0,1,2,3,4,1/2+3i");
    sub->add_option("--w5-sign", cfg.w5_sign, "sheet of the marked point over s5")->check(CLI::IsMember({"+", "-"}));
    sub->add_option("--precision", cfg.precision_bits, "starting precision in bits")->check(CLI::Range(128u, 1u << 16));
    sub->add_option("--max-precision", cfg.max_precision_bits, "escalation limit in bits")->check(CLI::Range(128u, 1u << 16));
    sub->add_option("--seed", cfg.seed, "random rational branch points (when --branch-points is absent)");
    sub->add_option("--dot", cfg.dot, "DOT diagram path ('-' for stdout with diagram)");
  };
  auto* cert = app.add_subcommand("certify", "build the tower and write the certificate");
  add_run_flags(cert);
  cert->add_option("--out", cfg.out, "certificate JSON path");
  auto* hesse = app.add_subcommand("hesse", "exact j-invariant from the Hesse pencil");
  auto* diagram = app.add_subcommand("diagram", "build the tower and write its DOT diagram");
  add_run_flags(diagram);

  CLI11_PARSE(app, argc, argv);

  try {
    if (hesse->parsed()) return hesse_command();
    auto* sub = cert->parsed() ? cert : diagram;
    const bool given = sub->count("--branch-points") > 0;
    if (diagram->parsed() && diagram->count("--dot") == 0) cfg.dot = "-";
    return certify_command(cfg, given, diagram->parsed());
  } catch (const DegenerateInput& e) {
    std::cerr << "degenerate input: " << e.what() << '\n';
    return 2;
  } catch (const RootFindingError& e) {
    std::cerr << "degenerate input: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const TrackingFailure& e) {
    std::cerr << "tracking failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
