#include "spherelab/cli.hpp"

#include <chrono>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "spherelab/acceptance.hpp"
#include "spherelab/constants.hpp"
#include "spherelab/error.hpp"
#include "spherelab/harness.hpp"
#include "spherelab/regions.hpp"
#include "spherelab/spectral.hpp"

namespace spherelab::cli {
namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_text(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return arg;
  std::ifstream in(arg, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + arg + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << content;
}

void check_format(const std::string& format) {
  if (format != "json" && format != "csv") throw InvalidArgument("format must be json or csv");
}

}  // namespace

std::string dump_json(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

CommandResult cmd_constants(const std::string& config_json, const std::string& format) {
  CommandResult res;
  try {
    check_format(format);
    const InductiveConfiguration config = configuration_from_json(parse_json(config_json));
    const DerivedConstants d = derive_constants(config);
    if (format == "json") {
      res.output = dump_json(constants_to_json(d));
    } else {
      std::string seq;
      for (double c : d.c_sequence) seq += (seq.empty() ? "" : ";") + num(c);
      res.output = "# schema=1\nvalid,C_R,eps_R,c_sequence,reason\n" + std::string(d.valid ? "true" : "false") + "," +
                   (d.valid ? num(d.exponent_C) : "") + "," + (d.valid ? num(d.exponent_eps) : "") + "," + seq +
                   ",\"" + d.reason + "\"\n";
    }
    if (!d.valid) {
      res.exit_code = kInvalidConfiguration;
      res.error = d.reason;
    }
  } catch (const InvalidConfiguration& e) {
    res.exit_code = kInvalidConfiguration;
    res.error = e.what();
  } catch (const std::exception& e) {
    res.exit_code = kInputError;
    res.error = e.what();
  }
  return res;
}

CommandResult cmd_spectral(int n, double r, int K, const std::string& format) {
  CommandResult res;
  try {
    check_format(format);
    if (K < 0) throw InvalidArgument("K must be >= 0");
    const EigenTable table = eigen_table(n, r, K);
    if (format == "csv") {
      std::string out = "# schema=1\nk,mu,r_pow_k,deviation\n";
      for (int k = 0; k <= K; ++k) {
        const double mu = table.values[static_cast<std::size_t>(k)];
        const double rk = std::pow(r, k);
        out += std::to_string(k) + "," + num(mu) + "," + num(rk) + "," + num(std::abs(mu - rk)) + "\n";
      }
      res.output = out;
    } else {
      nlohmann::json rows = nlohmann::json::array();
      for (int k = 0; k <= K; ++k) {
        const double mu = table.values[static_cast<std::size_t>(k)];
        const double rk = std::pow(r, k);
        rows.push_back({{"k", k}, {"mu", mu}, {"r_pow_k", rk}, {"deviation", std::abs(mu - rk)}});
      }
      res.output = dump_json({{"schema", 1}, {"n", n}, {"r", r}, {"K", K}, {"rows", rows}});
    }
  } catch (const std::exception& e) {
    res.exit_code = kInputError;
    res.error = e.what();
  }
  return res;
}

CommandResult cmd_threshold(int n, double measure) {
  CommandResult res;
  try {
    res.output = dump_json({{"n", n}, {"measure", measure}, {"t0", find_threshold_for_measure(n, measure)}});
  } catch (const std::exception& e) {
    res.exit_code = kInputError;
    res.error = e.what();
  }
  return res;
}

EstimateResult cmd_estimate(const EstimateRequest& req) {
  EstimateResult res;
  const auto start = std::chrono::steady_clock::now();
  try {
    check_format(req.format);
    if (req.workers < 1) throw InvalidArgument("workers must be >= 1");
    nlohmann::json doc = req.spec;
    if (!doc.is_object()) throw InvalidArgument("experiment spec must be a JSON object");
    if (req.samples) doc["samples"] = *req.samples;
    if (req.seed) doc["seed"] = *req.seed;
    ExperimentSpec spec = parse_experiment_spec(doc);
    spec.options.workers = req.workers;
    const ExperimentRun run = run_experiment(spec);
    res.report = run_to_json(spec, run);
    res.csv = report_csv_header();
    for (const auto& r : run.reports) res.csv += report_csv_row(r);
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    res.manifest = {{"tool", "spherelab"},
                    {"tool_version", kToolVersion},
                    {"command", "estimate"},
                    {"parameters", {{"workers", req.workers}, {"format", req.format}}},
                    {"spec", experiment_spec_to_json(spec)},
                    {"seed", spec.options.seed},
                    {"runtime_seconds", runtime}};
    if (req.out_dir) {
      std::filesystem::create_directories(*req.out_dir);
      const std::string json_text = dump_json(res.report);
      write_file(*req.out_dir / "report.json", json_text);
      write_file(*req.out_dir / "report.csv", res.csv);
      res.manifest["outputs"] = {{{"file", "report.json"}, {"sha256", sha256_hex(json_text)}},
                                 {{"file", "report.csv"}, {"sha256", sha256_hex(res.csv)}}};
      write_file(*req.out_dir / "manifest.json", dump_json(res.manifest));
    }
    if (res.report.at("assertable_failure").get<bool>()) res.exit_code = kCriterionFailure;
  } catch (const InvalidConfiguration& e) {
    res.exit_code = kInvalidConfiguration;
    res.error = e.what();
  } catch (const std::exception& e) {
    res.exit_code = kInputError;
    res.error = e.what();
  }
  return res;
}

EstimateResult cmd_replay(const nlohmann::json& manifest, int workers,
                          const std::optional<std::filesystem::path>& out_dir) {
  EstimateRequest req;
  try {
    if (manifest.value("command", std::string()) != "estimate") throw InvalidArgument("manifest is not an estimate run");
    req.spec = manifest.at("spec");
    req.format = manifest.at("parameters").value("format", std::string("json"));
  } catch (const std::exception& e) {
    EstimateResult res;
    res.exit_code = kInputError;
    res.error = std::string("manifest: ") + e.what();
    return res;
  }
  req.workers = workers;
  req.out_dir = out_dir;
  return cmd_estimate(req);
}

CommandResult cmd_verify(int workers) {
  CommandResult res;
  AcceptanceOptions options;
  options.workers = workers;
  bool all = true;
  for (int id = 1; id <= kAcceptanceCriteria; ++id) {
    const AcceptanceResult r = run_criterion(id, options);
    all = all && r.passed();
    res.output += format_acceptance_line(r) + "\n";
  }
  res.output += all ? "all criteria passed\n" : "some criteria failed\n";
  res.exit_code = all ? kOk : kCriterionFailure;
  return res;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo and spectral experiments on high-dimensional spheres", "spherelab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string format = "json";
  std::string table_format = "csv";
  int workers = 1;

  auto* constants = app.add_subcommand("constants", "Derived exponents for an inductive configuration");
  std::string config_arg;
  int k = 0;
  double r = 0.0;
  constants->add_option("config", config_arg, "Configuration JSON (inline or file)");
  constants->add_option("--k", k, "Simplex size (with --r, instead of a config)");
  constants->add_option("--r", r, "Simplex inner product");
  constants->add_option("--format", format, "json|csv");

  auto* spectral = app.add_subcommand("spectral", "Eigenvalues of the averaging operator");
  int n = 0;
  int K = 10;
  spectral->add_option("--n", n, "Ambient dimension")->required();
  spectral->add_option("--r", r, "Inner product")->required();
  spectral->add_option("--K", K, "Maximum degree");
  spectral->add_option("--format", table_format, "csv|json");

  auto* estimate = app.add_subcommand("estimate", "Run an experiment spec");
  std::string spec_arg;
  std::optional<std::uint64_t> samples, seed;
  std::string out_dir;
  estimate->add_option("spec", spec_arg, "Experiment spec JSON (inline or file)")->required();
  estimate->add_option("--samples", samples, "Override sample count");
  estimate->add_option("--seed", seed, "Override seed");
  estimate->add_option("--workers", workers, "Worker threads");
  estimate->add_option("--out", out_dir, "Directory for report and manifest");
  estimate->add_option("--format", format, "json|csv");

  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  std::string manifest_arg;
  replay->add_option("manifest", manifest_arg, "manifest.json")->required();
  replay->add_option("--workers", workers, "Worker threads");
  replay->add_option("--out", out_dir, "Directory for report and manifest");

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--workers", workers, "Worker threads");

  auto* threshold = app.add_subcommand("threshold", "Cap threshold with a given measure");
  double target = 0.0;
  threshold->add_option("--n", n, "Ambient dimension")->required();
  threshold->add_option("--measure", target, "Target measure in [0,1]")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kOk : kInputError;
  }

  CommandResult res;
  auto finish = [&](const CommandResult& c) {
    out << c.output;
    if (!c.error.empty()) err << "error: " << c.error << "\n";
    return c.exit_code;
  };
  auto finish_estimate = [&](const EstimateResult& e, const std::string& fmt) {
    CommandResult c;
    c.exit_code = e.exit_code;
    c.error = e.error;
    if (e.exit_code == kOk || e.exit_code == kCriterionFailure) c.output = fmt == "csv" ? e.csv : dump_json(e.report);
    return finish(c);
  };

  try {
    if (*constants) {
      std::string text;
      if (!config_arg.empty()) {
        text = read_text(config_arg);
      } else if (k >= 2) {
        text = configuration_to_json(InductiveConfiguration::simplex(k, r)).dump();
      } else {
        return finish({kInputError, "", "give a config or --k and --r"});
      }
      return finish(cmd_constants(text, format));
    }
    if (*spectral) return finish(cmd_spectral(n, r, K, table_format));
    if (*threshold) return finish(cmd_threshold(n, target));
    if (*verify) return finish(cmd_verify(workers));
    if (*estimate) {
      EstimateRequest req;
      req.spec = parse_json(read_text(spec_arg));
      req.samples = samples;
      req.seed = seed;
      req.workers = workers;
      req.format = format;
      if (!out_dir.empty()) req.out_dir = out_dir;
      return finish_estimate(cmd_estimate(req), format);
    }
    if (*replay) {
      const nlohmann::json manifest = parse_json(read_text(manifest_arg));
      const EstimateResult e =
          cmd_replay(manifest, workers, out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir));
      return finish_estimate(e, manifest.contains("parameters") ? manifest["parameters"].value("format", "json") : "json");
    }
  } catch (const InvalidConfiguration& e) {
    return finish({kInvalidConfiguration, "", e.what()});
  } catch (const std::exception& e) {
    return finish({kInputError, "", e.what()});
  }
  return kInputError;
}

}  // namespace spherelab::cli
