// Copyright 2026 The ctsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "ctsynth/accounting.h"
#include "ctsynth/audit.h"
#include "ctsynth/mechanisms.h"
#include "ctsynth/parallel.h"
#include "ctsynth/table.h"
#include "ctsynth/table_io.h"
#include "ctsynth/utility_metrics.h"
#include "json.hpp"

namespace ctsynth {
namespace {

using Json = nlohmann::ordered_json;

struct MechanismFlags {
  std::string name = "poisson";
  double alpha = 1.0;
  double laplace_epsilon = 1.0;
  double sigma = 1.0;
  double concentration = 1.0;
  std::vector<double> concentrations;
  std::size_t cells = 0;

  CLI::Option* alpha_opt = nullptr;
  CLI::Option* laplace_opt = nullptr;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* concentration_opt = nullptr;
  CLI::Option* concentrations_opt = nullptr;
};

struct Options {
  char delimiter = ',';
  int threads = 0;

  std::string input;
  std::string schema;
  std::string output;
  std::uint64_t seed = 0;
  int replicates = 1;
  // Copied from the parsed subcommand's flags before dispatch.
  MechanismFlags mech;
  MechanismFlags syn_mech, acc_mech, aud_mech;

  double epsilon = 1.0;
  double delta_target = 0.0;
  std::vector<double> alpha_grid;
  std::int64_t min_count = 0;
  std::int64_t a_max = 1000;
  std::int64_t n = 0;
  CLI::Option* epsilon_opt = nullptr;
  CLI::Option* delta_target_opt = nullptr;
  CLI::Option* min_count_opt = nullptr;

  std::vector<std::int64_t> a_values;
  std::int64_t trials = 100'000;
  bool post_rounding = false;
  std::int64_t scan_a_max = 0;

  std::vector<double> epsilons;
  std::vector<double> alphas;

  std::string original;
  std::vector<std::string> synthetic;
  std::int64_t count_min = 1;
  std::int64_t count_max = 10;
};

void AddMechanismFlags(CLI::App* cmd, MechanismFlags& m) {
  cmd->add_option("--mechanism", m.name, "Synthesis mechanism")
      ->check(CLI::IsMember({"poisson", "laplace", "gaussian", "dirichlet"}))
      ->capture_default_str();
  m.alpha_opt =
      cmd->add_option("--alpha", m.alpha, "Poisson pseudocount (>= 0)");
  m.laplace_opt = cmd->add_option("--laplace-epsilon", m.laplace_epsilon,
                                  "Laplace noise parameter (scale 1/eps)");
  m.sigma_opt = cmd->add_option("--sigma", m.sigma, "Gaussian noise sd");
  m.concentration_opt =
      cmd->add_option("--concentration", m.concentration,
                      "Dirichlet concentration applied to every cell");
  m.concentrations_opt = cmd->add_option("--concentrations", m.concentrations,
                                         "Dirichlet concentration per cell")
                             ->delimiter(',');
}

absl::Status Missing(const std::string& flag, const std::string& mechanism) {
  return absl::InvalidArgumentError(
      absl::StrCat(flag, " is required for the ", mechanism, " mechanism"));
}

// `cells` gives the Dirichlet vector length for a scalar --concentration.
absl::StatusOr<MechanismSpec> BuildSpec(const MechanismFlags& m,
                                        std::optional<std::size_t> cells) {
  MechanismSpec spec;
  if (m.name == "poisson") {
    if (m.alpha_opt->count() == 0) return Missing("--alpha", m.name);
    spec = PoissonSpec{m.alpha};
  } else if (m.name == "laplace") {
    if (m.laplace_opt->count() == 0)
      return Missing("--laplace-epsilon", m.name);
    spec = LaplaceSpec{m.laplace_epsilon};
  } else if (m.name == "gaussian") {
    if (m.sigma_opt->count() == 0) return Missing("--sigma", m.name);
    spec = GaussianSpec{m.sigma};
  } else {
    if (m.concentrations_opt->count() > 0) {
      spec = DirichletSpec{m.concentrations};
    } else if (m.concentration_opt->count() > 0) {
      if (!cells.has_value() || *cells == 0) {
        return absl::InvalidArgumentError(
            "--concentration needs a cell count (--cells) here");
      }
      spec = DirichletSpec{std::vector<double>(*cells, m.concentration)};
    } else {
      return Missing("--concentration or --concentrations", m.name);
    }
  }
  const bool sized = std::holds_alternative<DirichletSpec>(spec);
  if (auto s = ValidateSpec(spec, sized ? cells : std::nullopt); !s.ok()) {
    return s;
  }
  return spec;
}

std::vector<std::string> Provenance(
    const std::string& command,
    const std::map<std::string, std::string>& params) {
  std::string canonical = absl::StrCat("command=", command, "\n");
  for (const auto& [k, v] : params)
    absl::StrAppend(&canonical, k, "=", v, "\n");
  std::vector<std::string> lines;
  lines.push_back(absl::StrCat("tool: ctsynth ", kToolVersion));
  lines.push_back(absl::StrCat("command: ", command));
  for (const auto& [k, v] : params) lines.push_back(absl::StrCat(k, ": ", v));
  lines.push_back(absl::StrCat("config-hash: ", HashHex(canonical)));
  return lines;
}

std::string CommentBlock(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) absl::StrAppend(&out, "# ", l, "\n");
  return out;
}

absl::StatusOr<Schema> LoadSchema(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  return SchemaFromJson(*text);
}

absl::StatusOr<ContingencyTable> LoadTable(const std::string& path,
                                           const std::string& schema_path,
                                           char delimiter) {
  auto schema =
      LoadSchema(schema_path.empty() ? SchemaSidecarPath(path) : schema_path);
  if (!schema.ok()) return schema.status();
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  return ParseTable(*text, *schema, delimiter);
}

// Writes every (path, contents) pair or none of them.
absl::Status WriteAll(
    const std::vector<std::pair<std::string, std::string>>& files) {
  std::vector<std::string> written;
  for (const auto& [path, contents] : files) {
    if (auto s = WriteFileAtomic(path, contents); !s.ok()) {
      for (const auto& w : written) std::remove(w.c_str());
      return s;
    }
    written.push_back(path);
  }
  return absl::OkStatus();
}

absl::Status Emit(const std::string& path, const std::string& contents,
                  std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
    return absl::OkStatus();
  }
  return WriteFileAtomic(path, contents);
}

absl::Status CmdTabulate(const Options& o, std::ostream&) {
  std::optional<Schema> schema;
  if (!o.schema.empty()) {
    auto s = LoadSchema(o.schema);
    if (!s.ok()) return s.status();
    schema = *std::move(s);
  }
  auto text = ReadFile(o.input);
  if (!text.ok()) return text.status();
  auto data = ParseMicrodata(*text, o.delimiter);
  if (!data.ok()) return data.status();
  if (!schema.has_value() && data->rows.empty()) {
    return absl::InvalidArgumentError(
        "cannot infer a schema from empty microdata; pass --schema");
  }
  auto table = TabulateMicrodata(*data, schema, o.threads);
  if (!table.ok()) return table.status();
  auto prov =
      Provenance("tabulate", {{"individuals", absl::StrCat(table->n())},
                              {"cells", absl::StrCat(table->num_cells())}});
  return WriteAll(
      {{o.output, FormatTable(*table, o.delimiter, prov)},
       {SchemaSidecarPath(o.output), SchemaToJson(table->schema())}});
}

absl::Status CmdSynthesize(const Options& o, std::ostream&) {
  if (o.replicates < 1) {
    return absl::InvalidArgumentError("--replicates must be >= 1");
  }
  auto table = LoadTable(o.input, o.schema, o.delimiter);
  if (!table.ok()) return table.status();
  auto spec = BuildSpec(o.mech, table->num_cells());
  if (!spec.ok()) return spec.status();

  std::vector<std::pair<std::string, std::string>> files;
  for (int r = 0; r < o.replicates; ++r) {
    const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(r);
    auto synthetic = Synthesize(*table, *spec, seed, o.threads);
    if (!synthetic.ok()) return synthetic.status();
    const std::string path =
        o.replicates == 1 ? o.output : absl::StrCat(o.output, ".", r + 1);
    auto prov = Provenance("synthesize", {{"mechanism", DescribeSpec(*spec)},
                                          {"seed", absl::StrCat(seed)}});
    files.emplace_back(path, FormatTable(synthetic->table, o.delimiter, prov));
    files.emplace_back(SchemaSidecarPath(path),
                       SchemaToJson(synthetic->table.schema()));
  }
  return WriteAll(files);
}

Json Record(const std::string& operation, Json inputs, Json outputs) {
  Json r;
  r["operation"] = operation;
  r["inputs"] = std::move(inputs);
  r["outputs"] = std::move(outputs);
  return r;
}

absl::StatusOr<Json> AccountPoisson(const Options& o) {
  Json records = Json::array();
  const double eps = o.epsilon;
  std::vector<double> grid = o.alpha_grid;
  if (grid.empty() && o.mech.alpha_opt->count() > 0) grid = {o.mech.alpha};

  if (o.delta_target_opt->count() > 0) {
    if (grid.empty()) {
      return absl::InvalidArgumentError(
          "--delta-target needs --alpha-grid (or --alpha)");
    }
    auto choice = AlphaForDelta(eps, o.delta_target, grid);
    if (!choice.ok()) return choice.status();
    Json out;
    out["achievable"] = choice->has_value();
    if (choice->has_value()) {
      out["alpha"] = (*choice)->alpha;
      out["delta"] = (*choice)->delta;
    }
    records.push_back(Record("alpha_for_delta",
                             {{"epsilon", eps},
                              {"delta_target", o.delta_target},
                              {"alpha_grid", grid}},
                             out));
    return records;
  }
  if (o.min_count_opt->count() > 0 ||
      (grid.size() == 1 && grid.front() == 0.0)) {
    auto delta = PoissonDeltaNoZeros(eps, o.min_count);
    if (!delta.ok()) return delta.status();
    records.push_back(Record("poisson_delta_no_zeros",
                             {{"epsilon", eps}, {"min_count", o.min_count}},
                             {{"delta", *delta}}));
    return records;
  }
  if (grid.empty()) {
    return absl::InvalidArgumentError(
        "poisson accounting needs --alpha, --alpha-grid or --min-count");
  }
  for (double alpha : grid) {
    if (eps >= 1.0) {
      auto delta = PoissonDelta(eps, alpha);
      if (!delta.ok()) return delta.status();
      records.push_back(Record("poisson_delta",
                               {{"epsilon", eps}, {"alpha", alpha}},
                               {{"delta", *delta}}));
    } else {
      auto delta = PoissonDeltaConservative(eps, alpha, o.a_max);
      if (!delta.ok()) return delta.status();
      records.push_back(
          Record("poisson_delta_conservative",
                 {{"epsilon", eps}, {"alpha", alpha}, {"a_max", o.a_max}},
                 {{"delta", *delta},
                  {"note",
                   "union-bound upper bound on delta for 0 < epsilon < 1; "
                   "not a tight value"}}));
    }
  }
  return records;
}

absl::Status CmdAccount(const Options& o, std::ostream& out) {
  absl::StatusOr<Json> records;
  const std::string& mech = o.mech.name;
  if (mech == "poisson") {
    records = AccountPoisson(o);
  } else if (mech == "gaussian") {
    if (o.mech.sigma_opt->count() == 0) return Missing("--sigma", mech);
    auto delta = GaussianDelta(o.epsilon, o.mech.sigma);
    if (!delta.ok()) return delta.status();
    records = Json::array({Record(
        "gaussian_delta", {{"epsilon", o.epsilon}, {"sigma", o.mech.sigma}},
        {{"delta", *delta}})});
  } else if (mech == "laplace") {
    auto spec = BuildSpec(o.mech, std::nullopt);
    if (!spec.ok()) return spec.status();
    records = Json::array(
        {Record("laplace_budget", {{"laplace_epsilon", o.mech.laplace_epsilon}},
                {{"epsilon", o.mech.laplace_epsilon}, {"delta", 0.0}})});
  } else {
    auto bound = DirichletMinConcentration(o.n, o.epsilon);
    if (!bound.ok()) return bound.status();
    Json outputs{{"min_max_concentration", *bound}};
    if (o.mech.concentrations_opt->count() > 0 ||
        o.mech.concentration_opt->count() > 0) {
      auto spec = BuildSpec(o.mech, std::nullopt);
      if (o.mech.concentrations_opt->count() == 0) {
        spec = BuildSpec(o.mech, std::size_t{1});
      }
      if (!spec.ok()) return spec.status();
      const auto& c = std::get<DirichletSpec>(*spec).concentrations;
      const double max_c = *std::max_element(c.begin(), c.end());
      outputs["max_concentration"] = max_c;
      outputs["satisfied"] = max_c >= *bound;
    }
    records =
        Json::array({Record("dirichlet_min_concentration",
                            {{"n", o.n}, {"epsilon", o.epsilon}}, outputs)});
  }
  if (!records.ok()) return records.status();
  return Emit(o.output, records->dump(2) + "\n", out);
}

absl::Status CmdAudit(const Options& o, std::ostream& out) {
  if (o.trials < 1) return absl::InvalidArgumentError("--trials must be >= 1");
  auto spec = BuildSpec(o.mech, o.mech.cells > 0
                                    ? std::optional<std::size_t>(o.mech.cells)
                                    : std::nullopt);
  if (!spec.ok()) return spec.status();
  AuditConfig config;
  config.mechanism = *spec;
  config.epsilon = o.epsilon;
  config.trials = o.trials;
  config.a_values = o.a_values;
  config.seed = o.seed;
  config.post_rounding = o.post_rounding;
  config.dirichlet_total = o.n;
  config.threads = o.threads;
  auto report = RunAudit(config);
  if (!report.ok()) return report.status();
  std::string text;
  if (o.scan_a_max > 0) {
    const auto* poisson = std::get_if<PoissonSpec>(&*spec);
    if (poisson == nullptr) {
      return absl::InvalidArgumentError(
          "--scan-a-max applies to the poisson mechanism only");
    }
    auto worst = WorstCaseScan(poisson->alpha, o.epsilon, o.scan_a_max);
    if (!worst.ok()) return worst.status();
    text = absl::StrFormat(
        "# worst_case_scan: a_max=%d argmin_a_k=%d min_pass_rate=%.10f\n",
        o.scan_a_max, worst->a_k, worst->pass_rate);
  }
  text = CommentBlock({absl::StrCat("tool: ctsynth ", kToolVersion)}) + text +
         FormatAuditReport(*report);
  return Emit(o.output, text, out);
}

absl::Status CmdCurve(const Options& o, std::ostream& out) {
  auto curve = ComputeRiskCurve(o.epsilons, o.alphas);
  if (!curve.ok()) return curve.status();
  auto join = [](const std::vector<double>& v) {
    return absl::StrJoin(
        v, ";", [](std::string* s, double x) { s->append(ShortestDouble(x)); });
  };
  auto prov = Provenance(
      "curve", {{"epsilons", join(o.epsilons)}, {"alphas", join(o.alphas)}});
  return Emit(o.output, CommentBlock(prov) + FormatRiskCurve(*curve), out);
}

absl::Status CmdUtility(const Options& o, std::ostream& out) {
  auto original = LoadTable(o.original, o.schema, o.delimiter);
  if (!original.ok()) return original.status();
  std::vector<ContingencyTable> synthetic;
  for (const std::string& path : o.synthetic) {
    auto t = LoadTable(path, "", o.delimiter);
    if (!t.ok()) return t.status();
    synthetic.push_back(*std::move(t));
  }
  auto report =
      PercentageDifferences(*original, synthetic, {o.count_min, o.count_max});
  if (!report.ok()) return report.status();
  double mad = 0.0;
  for (const auto& s : synthetic) mad += *MeanAbsoluteDeviation(*original, s);
  mad /= static_cast<double>(synthetic.size());
  auto prov = Provenance(
      "utility", {{"replicates", absl::StrCat(synthetic.size())},
                  {"count-range", absl::StrCat(o.count_min, "-", o.count_max)},
                  {"mean-absolute-deviation", absl::StrFormat("%.10f", mad)}});
  return Emit(o.output, CommentBlock(prov) + FormatUtilityReport(*report), out);
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kDataLoss:
      return kExitIo;
    default:
      return kExitValidation;
  }
}

std::string HashHex(std::string_view data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return absl::StrFormat("%016x", h);
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  Options o;
  CLI::App app{"Privacy-protected synthesis of contingency tables"};
  app.set_config("--config", "",
                 "TOML/INI config file; command-line flags take precedence");
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1, 1);
  app.add_option("--delimiter", o.delimiter, "Field delimiter")
      ->capture_default_str();
  app.add_option("--threads", o.threads,
                 absl::StrCat("Worker threads (default: $", kThreadsEnvVar,
                              " or hardware concurrency)"));

  auto* tab = app.add_subcommand("tabulate", "Microdata -> contingency table");
  tab->add_option("--input", o.input, "Microdata file")->required();
  tab->add_option("--schema", o.schema, "Schema descriptor (JSON)");
  tab->add_option("--output", o.output, "Table file")->required();

  auto* syn = app.add_subcommand("synthesize", "Table -> synthetic table");
  syn->add_option("--input", o.input, "Table file")->required();
  syn->add_option("--schema", o.schema,
                  "Schema descriptor (default: <input>.schema.json)");
  syn->add_option("--output", o.output, "Synthetic table file")->required();
  syn->add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
  syn->add_option("--replicates", o.replicates,
                  "Replicates; replicate r uses seed + r - 1 and is written "
                  "to <output>.r")
      ->capture_default_str();
  AddMechanismFlags(syn, o.syn_mech);

  auto* acc = app.add_subcommand("account", "Privacy accounting");
  AddMechanismFlags(acc, o.acc_mech);
  o.epsilon_opt = acc->add_option("--epsilon", o.epsilon, "Target epsilon");
  o.delta_target_opt = acc->add_option("--delta-target", o.delta_target,
                                       "Find the smallest alpha reaching this");
  acc->add_option("--alpha-grid", o.alpha_grid, "Ascending alpha values")
      ->delimiter(',');
  o.min_count_opt = acc->add_option("--min-count", o.min_count,
                                    "Smallest count (alpha = 0, no zeros)");
  acc->add_option("--a-max", o.a_max, "Scan cap for 0 < epsilon < 1")
      ->capture_default_str();
  acc->add_option("--n", o.n, "Table total (dirichlet)");
  acc->add_option("--output", o.output, "Output file (default stdout)");

  auto* aud = app.add_subcommand("audit", "Monte Carlo privacy audit");
  AddMechanismFlags(aud, o.aud_mech);
  aud->add_option("--cells", o.aud_mech.cells,
                  "Cell count for a scalar --concentration");
  aud->add_option("--epsilon", o.epsilon, "Epsilon to audit")->required();
  aud->add_option("--a-values", o.a_values, "Original counts a_k to audit")
      ->delimiter(',')
      ->required();
  aud->add_option("--trials", o.trials, "Trials per a_k")
      ->capture_default_str();
  aud->add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
  aud->add_flag("--post-rounding", o.post_rounding,
                "Audit released integers (laplace/gaussian; empirical only)");
  aud->add_option("--n", o.n, "Table total (dirichlet)");
  aud->add_option("--scan-a-max", o.scan_a_max,
                  "Also report the exact worst case over a_k = 1..N (poisson)");
  aud->add_option("--output", o.output, "Output file (default stdout)");

  auto* cur = app.add_subcommand("curve", "Tabulate (alpha, epsilon, delta)");
  cur->add_option("--epsilons", o.epsilons, "Epsilon values (>= 1)")
      ->delimiter(',')
      ->required();
  cur->add_option("--alphas", o.alphas, "Alpha values (> 0)")
      ->delimiter(',')
      ->required();
  cur->add_option("--output", o.output, "Output file (default stdout)");

  auto* util = app.add_subcommand("utility", "Percentage-difference report");
  util->add_option("--original", o.original, "Original table")->required();
  util->add_option("--schema", o.schema,
                   "Schema descriptor (default: <original>.schema.json)");
  util->add_option("--synthetic", o.synthetic,
                   "Synthetic table(s), pooled as replicates")
      ->required();
  util->add_option("--count-min", o.count_min)->capture_default_str();
  util->add_option("--count-max", o.count_max)->capture_default_str();
  util->add_option("--output", o.output, "Output file (default stdout)");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("ctsynth");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  if (o.threads <= 0) o.threads = DefaultThreadCount();
  if (syn->parsed()) o.mech = o.syn_mech;
  if (acc->parsed()) o.mech = o.acc_mech;
  if (aud->parsed()) o.mech = o.aud_mech;

  absl::Status status;
  if (tab->parsed()) {
    status = CmdTabulate(o, out);
  } else if (syn->parsed()) {
    status = CmdSynthesize(o, out);
  } else if (acc->parsed()) {
    if (o.epsilon_opt->count() == 0 && o.mech.name != "laplace") {
      status = absl::InvalidArgumentError("--epsilon is required");
    } else {
      status = CmdAccount(o, out);
    }
  } else if (aud->parsed()) {
    status = CmdAudit(o, out);
  } else if (cur->parsed()) {
    status = CmdCurve(o, out);
  } else {
    status = CmdUtility(o, out);
  }
  if (!status.ok()) {
    err << "error: " << status.message() << "\n";
    return ExitCodeFor(status);
  }
  return kExitOk;
}

}  // namespace ctsynth
