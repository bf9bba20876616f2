#include "sopa/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sopa/bpmn.hpp"
#include "sopa/costing.hpp"
#include "sopa/error.hpp"
#include "sopa/oracle.hpp"
#include "sopa/report.hpp"
#include "sopa/simulator.hpp"
#include "sopa/variant_config.hpp"
#include "sopa/xes.hpp"

namespace sopa::cli {
namespace {

namespace fs = std::filesystem;

// Failure that maps to exit code 1 with a preformatted message.
struct InputFailure {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputFailure{path + ": cannot open file"};
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputFailure{path + ": read error"};
  return ss.str();
}

void write_output(const std::string& path, const std::string& bytes, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << bytes;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputFailure{path + ": cannot write file"};
  f << bytes;
  f.close();
  if (!f) throw InputFailure{path + ": write error"};
}

std::string lower_extension(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

// "out/A.report.json" -> "A"
std::string scenario_from_path(const std::string& path) {
  std::string name = fs::path(path).filename().string();
  for (const char* suffix : {".report.json", ".json", ".xes"}) {
    const std::string s(suffix);
    if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0) return name.substr(0, name.size() - s.size());
  }
  return fs::path(path).stem().string();
}

Format format_for_output(const std::string& path, const std::string& explicit_format, Format fallback) {
  if (!explicit_format.empty()) return parse_format(explicit_format);
  if (path.empty() || path == "-") return fallback;
  const std::string ext = lower_extension(path);
  if (ext == ".json") return Format::Json;
  if (ext == ".csv") return Format::Csv;
  if (ext == ".svg") return Format::SvgBar;
  if (ext == ".md" || ext == ".markdown") return Format::MarkdownTable;
  throw ValidationError("cannot infer output format from '" + path + "'; use --format");
}

struct ModelInputs {
  std::string model;
  std::string annotations;
  std::string variants;
  bool tolerant = false;
};

ProcessModel load_model(const ModelInputs& in) {
  const std::string bpmn = read_file(in.model);
  const std::string sidecar = in.annotations.empty() ? std::string() : read_file(in.annotations);
  return parse_model(bpmn, sidecar, in.model, in.annotations);
}

CostVariantConfig load_config(const std::string& path, bool tolerant) {
  return parse_variant_config(read_file(path), VariantConfigOptions{tolerant}, path);
}

void add_model_options(CLI::App* cmd, ModelInputs& in, bool model_required) {
  auto* m = cmd->add_option("--model", in.model, "BPMN 2.0 process model");
  if (model_required) m->required();
  cmd->add_option("--annotations", in.annotations, "annotation sidecar (<sopaAnnotations>)");
  cmd->add_option("--variants", in.variants, "cost variant configuration")->required();
  cmd->add_flag("--tolerant-frequencies", in.tolerant, "renormalize frequency sums within 1e-9 of one");
}

void print_diagnostics(const std::vector<Diagnostic>& diags, const std::string& source, std::ostream& err) {
  for (const auto& d : diags) err << source << ": " << d.code << ": " << d.message << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Environmental process cost simulation and analysis", "sopa"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // simulate
  ModelInputs sim_in;
  std::optional<std::uint64_t> sim_instances;
  std::uint64_t sim_seed = 42;
  bool sim_quota = false;
  std::uint64_t sim_max_iter = 10'000;
  std::string sim_base;
  std::string sim_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate an event log from a model and cost variants");
  add_model_options(simulate_cmd, sim_in, true);
  simulate_cmd->add_option("--instances", sim_instances, "number of process instances (default: config count)")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim_seed, "random seed")->capture_default_str();
  simulate_cmd->add_flag("--exact-variant-quotas", sim_quota, "assign variants by exact frequency quotas");
  simulate_cmd->add_option("--max-iterations", sim_max_iter, "maximum visits of one node per trace")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--base-timestamp", sim_base, "timestamp of the first event of every trace");
  simulate_cmd->add_option("--out", sim_out, "output XES file (default: stdout)");

  // analyze
  std::string an_log, an_variants, an_scenario, an_out, an_csv, an_md;
  bool an_lenient = false, an_strict_variants = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "compute environmental costs of an event log");
  analyze_cmd->add_option("--log", an_log, "XES event log")->required();
  analyze_cmd->add_option("--variants", an_variants, "cost variant configuration");
  analyze_cmd->add_flag("--lenient", an_lenient, "skip unresolved drivers with a warning");
  analyze_cmd->add_flag("--require-variants", an_strict_variants, "reject traces without cost:variant");
  analyze_cmd->add_option("--scenario", an_scenario, "scenario label (default: output file stem)");
  analyze_cmd->add_option("--out", an_out, "JSON cost report (default: stdout)");
  analyze_cmd->add_option("--csv", an_csv, "additional CSV output");
  analyze_cmd->add_option("--markdown", an_md, "additional markdown table output");

  // compare
  std::vector<std::string> cmp_reports;
  std::string cmp_out, cmp_format;
  auto* compare_cmd = app.add_subcommand("compare", "relative differences of candidate reports against a baseline");
  compare_cmd->add_option("reports", cmp_reports, "BASELINE.json CANDIDATE.json [CANDIDATE.json...]")
      ->required()
      ->expected(2, -1);
  compare_cmd->add_option("--out", cmp_out, "output file; format from extension (.md, .json, .csv)");
  compare_cmd->add_option("--format", cmp_format, "json, csv or markdown-table");

  // expect
  ModelInputs ex_in;
  std::string ex_out, ex_format;
  auto* expect_cmd = app.add_subcommand("expect", "analytic expected costs of a model");
  add_model_options(expect_cmd, ex_in, true);
  expect_cmd->add_option("--out", ex_out, "output file (default: stdout, JSON)");
  expect_cmd->add_option("--format", ex_format, "json, csv or markdown-table");

  // validate
  ModelInputs va_in;
  auto* validate_cmd = app.add_subcommand("validate", "check a model and cost variant configuration");
  add_model_options(validate_cmd, va_in, false);

  // render
  std::vector<std::string> rd_reports;
  std::string rd_format, rd_chart = "activities", rd_out;
  auto* render_cmd = app.add_subcommand("render", "render one or more cost reports side by side");
  render_cmd->add_option("reports", rd_reports, "REPORT.json...")->required();
  render_cmd->add_option("--format", rd_format, "json, csv, svg-bar or markdown-table");
  render_cmd->add_option("--chart", rd_chart, "svg-bar chart: activities or instances")
      ->check(CLI::IsMember({"activities", "instances"}))
      ->capture_default_str();
  render_cmd->add_option("--out", rd_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate_cmd) {
      const ProcessModel model = load_model(sim_in);
      const CostVariantConfig config = load_config(sim_in.variants, sim_in.tolerant);
      if (auto diags = validate(model, config); !diags.empty()) {
        print_diagnostics(diags, sim_in.model, err);
        return 1;
      }
      SimulationSettings settings;
      settings.instances = sim_instances.value_or(config.count);
      settings.seed = sim_seed;
      settings.variant_mode = sim_quota ? VariantMode::ExactQuota : VariantMode::Sampled;
      settings.max_iterations = sim_max_iter;
      if (!sim_base.empty()) settings.base_timestamp = Timestamp::parse(sim_base);
      settings.threads = threads_from_env();
      write_output(sim_out, write_xes(simulate(model, config, settings)), out);
    } else if (*analyze_cmd) {
      const XesReadResult parsed = parse_xes(read_file(an_log), XesReadOptions{an_strict_variants}, an_log);
      for (const auto& w : parsed.warnings) err << an_log << ": warning: " << w << "\n";
      std::optional<CostVariantConfig> config;
      if (!an_variants.empty()) config = load_config(an_variants, false);
      AnalyzeOptions options;
      options.scenario = !an_scenario.empty() ? an_scenario
                         : !an_out.empty()    ? scenario_from_path(an_out)
                                              : scenario_from_path(an_log);
      options.mode = an_lenient ? Resolution::Lenient : Resolution::Strict;
      options.threads = threads_from_env();
      const CostReport report = analyze(parsed.log, config ? &*config : nullptr, options);
      for (const auto& w : report.warnings) err << an_log << ": warning: " << w << "\n";
      if (report.warning_count > report.warnings.size())
        err << an_log << ": warning: " << (report.warning_count - report.warnings.size()) << " more unresolved drivers\n";
      write_output(an_out, render(report, Format::Json), out);
      if (!an_csv.empty()) write_output(an_csv, render(report, Format::Csv), out);
      if (!an_md.empty()) write_output(an_md, render(report, Format::MarkdownTable), out);
    } else if (*compare_cmd) {
      std::vector<CostReport> reports;
      for (const auto& path : cmp_reports) {
        CostReport r = parse_report_json(read_file(path), path);
        if (r.scenario.empty()) r.scenario = scenario_from_path(path);
        reports.push_back(std::move(r));
      }
      std::vector<ComparisonReport> comparisons;
      for (std::size_t i = 1; i < reports.size(); ++i) comparisons.push_back(compare(reports[0], reports[i]));
      const Format format = format_for_output(cmp_out, cmp_format, Format::MarkdownTable);
      write_output(cmp_out, render(comparisons, format), out);
    } else if (*expect_cmd) {
      const ProcessModel model = load_model(ex_in);
      const CostVariantConfig config = load_config(ex_in.variants, ex_in.tolerant);
      if (auto diags = validate(model, config); !diags.empty()) {
        print_diagnostics(diags, ex_in.model, err);
        return 1;
      }
      const Format format = format_for_output(ex_out, ex_format, Format::Json);
      write_output(ex_out, render(expect(model, config), format), out);
    } else if (*validate_cmd) {
      const CostVariantConfig config = load_config(va_in.variants, va_in.tolerant);
      if (va_in.model.empty()) {
        out << va_in.variants << ": ok (" << config.variants.size() << " variants)\n";
        return 0;
      }
      const ProcessModel model = load_model(va_in);
      const auto diags = validate(model, config);
      if (!diags.empty()) {
        print_diagnostics(diags, va_in.model, err);
        return 1;
      }
      out << va_in.model << ": ok (" << model.nodes().size() << " nodes, " << model.flows().size() << " flows, "
          << config.variants.size() << " variants)\n";
    } else if (*render_cmd) {
      std::vector<CostReport> reports;
      for (const auto& path : rd_reports) {
        CostReport r = parse_report_json(read_file(path), path);
        if (r.scenario.empty()) r.scenario = scenario_from_path(path);
        reports.push_back(std::move(r));
      }
      RenderOptions options;
      options.chart = rd_chart == "instances" ? Chart::Instances : Chart::Activities;
      const Format format = format_for_output(rd_out, rd_format, Format::MarkdownTable);
      write_output(rd_out, render(reports, format, options), out);
    }
  } catch (const InputFailure& f) {
    err << "error: " << f.message << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace sopa::cli
