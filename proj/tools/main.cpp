#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "run_config.hpp"
#include "svg_plot.hpp"

using namespace calderon;
using namespace calderon::cli;

namespace {

constexpr int kExitPass = 0, kExitUsage = 1, kExitFailed = 2;

void print_table(const ExperimentRecord& r, std::size_t max_rows = 24) {
  std::vector<std::size_t> width(r.columns.size(), 0);
  for (std::size_t j = 0; j < r.columns.size(); ++j) width[j] = r.columns[j].size();
  const std::size_t shown = std::min(max_rows, r.rows.size());
  for (std::size_t i = 0; i < shown; ++i)
    for (std::size_t j = 0; j < r.rows[i].size() && j < width.size(); ++j)
      width[j] = std::max(width[j], std::min<std::size_t>(r.rows[i][j].size(), 24));
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size() && j < width.size(); ++j)
      std::printf("%s%-*s", j ? "  " : "", int(width[j]), cells[j].substr(0, 24).c_str());
    std::printf("\n");
  };
  line(r.columns);
  for (std::size_t i = 0; i < shown; ++i) line(r.rows[i]);
  if (shown < r.rows.size()) std::printf("... %zu more rows in the CSV\n", r.rows.size() - shown);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for multilinear Calderón commutators"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List the available experiments");

  auto* run = app.add_subcommand("run", "Run one experiment and write CSV, JSON and SVG output");
  std::string config_path;
  std::vector<std::string> sets;
  bool dump = false, no_plot = false;
  std::map<std::string, std::optional<std::string>> flags{
      {"experiment", {}}, {"n", {}},     {"L", {}},       {"R", {}},        {"seed", {}},     {"out", {}},
      {"d", {}},          {"d_max", {}}, {"n_max", {}},   {"n1_max", {}},   {"trials", {}},   {"shifts", {}},
      {"identity", {}},   {"operator", {}}, {"shift_operator", {}}, {"exponents", {}},
  };
  run->add_option("--config,-c", config_path, "key = value config file with [section] headers");
  for (auto& [key, slot] : flags) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    run->add_option("--" + name, slot, "sets config key '" + key + "'");
  }
  run->add_option("--set", sets, "override any config key: key=value (repeatable)");
  run->add_flag("--no-plot", no_plot, "skip the SVG plot");
  run->add_flag("--dump-config", dump, "print the resolved config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  if (*list) {
    for (const auto& e : catalog()) std::printf("%-18s %s\n%-18s   anchor: %s\n", e.id.c_str(), e.description.c_str(), "", e.anchor.c_str());
    return kExitPass;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = RunConfig::load(config_path);
    for (const auto& [key, value] : flags)
      if (value) cfg.set(key, *value);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (no_plot) cfg.set("plot", "false");
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  }
  if (dump) {
    std::printf("%s", cfg.dump().c_str());
    return kExitPass;
  }

  ExperimentRecord rec;
  try {
    rec = execute(cfg);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid parameters: %s\n", e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  }

  const std::string out = cfg.text("out"), stem = cfg.text("experiment");
  persist(rec, out, stem);
  std::ofstream(std::filesystem::path(out) / (stem + ".config")) << cfg.dump();
  if (cfg.flag("plot")) {
    const std::string svg = render_svg(rec);
    if (!svg.empty()) std::ofstream(std::filesystem::path(out) / (stem + ".svg")) << svg;
  }

  print_table(rec);
  for (const auto& f : rec.fits)
    std::printf("fit %-10s slope %.6g  R2 %.4f  (%zu points)\n", f.name.c_str(), f.slope, f.r2, f.points);
  for (const auto& n : rec.notes) std::printf("note: %s\n", n.c_str());
  std::printf("verdict: %s\n", rec.verdict.c_str());
  std::printf("%s  (%.2f s, output in %s)\n", rec.pass ? "PASS" : "FAIL", rec.wall_time, out.c_str());
  return rec.pass ? kExitPass : kExitFailed;
}
