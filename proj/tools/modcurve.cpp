// modcurve: isolated points above rational j-invariants on modular curves.
//
//   modcurve level7 [--full-graph] [--dot out.dot]
//   modcurve x0 --j -160855552000/1594323 [--generators image.txt]
//   modcurve subgroups --level 7
//   modcurve genus 'B0(26)'

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "modcurve/commands.hpp"

int main(int argc, char** argv) {
  using namespace modcurve;

  CLI::App app{"Modular-curve lattices, closed points and isolation graphs above rational j-invariants"};
  app.require_subcommand(1);

  RunConfig config;
  std::string cache_dir = config.cache_dir.string();
  std::string format = "table";
  std::string dot_path, generators_path, j_text;
  unsigned level = 7;
  std::string group_text;

  const std::map<std::string, OutputFormat> formats{
      {"table", OutputFormat::Table}, {"json", OutputFormat::Json}, {"csv", OutputFormat::Csv}, {"dot", OutputFormat::Dot}};

  app.add_option("--cache-dir", cache_dir, "Directory for subgroup-lattice caches (default $MODCURVE_CACHE_DIR)")
      ->capture_default_str();
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "json", "csv", "dot"}));
  app.add_option("--jobs", config.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* level7 = app.add_subcommand("level7", "Level-7 lattice, isolation graphs and the surviving closed points");
  level7->add_flag("--full-graph", config.full_graph, "Also build the full (unquotiented) isolation graph");
  level7->add_option("--dot", dot_path, "Write the quotient graph as DOT to this path");

  auto* x0 = app.add_subcommand("x0", "Closed points of X_0(d), d dividing the sl level, above an exceptional j");
  x0->add_option("--j", j_text, "j-invariant as num/den, or 'level78'")->required();
  x0->add_option("--generators", generators_path, "Galois image generator file ('mod n' header, one matrix per line)")
      ->check(CLI::ExistingFile);

  auto* subgroups = app.add_subcommand("subgroups", "Subgroups of GL2(Z/n) containing -I, by conjugacy class");
  subgroups->add_option("--level", level, "Level n")->check(CLI::Range(1u, unsigned{kMaxModulus}));

  auto* genus_cmd = app.add_subcommand("genus", "Invariants of X_H for a group literal or builtin");
  genus_cmd->add_option("group", group_text, "e.g. '<[[2,0],[0,4]],[[0,2],[1,0]] mod 7>', B0(11), GL2(7), G3")
      ->required();

  for (auto* sub : {level7, x0, subgroups, genus_cmd}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  config.cache_dir = cache_dir;
  config.format = formats.at(format);
  if (!dot_path.empty()) config.dot_path = dot_path;
  if (!generators_path.empty()) config.generators = generators_path;

  Report report;
  try {
    if (*level7) {
      report = cmd_level7(config);
    } else if (*x0) {
      report = cmd_x0(j_text, config);
    } else if (*subgroups) {
      report = cmd_subgroups(level, config);
    } else {
      report = cmd_genus(group_text, config);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!report.warnings.empty()) std::cerr << report.warnings << (report.warnings.back() == '\n' ? "" : "\n");
  std::cout << report.text << std::flush;
  return report.ok ? 0 : 1;
}
