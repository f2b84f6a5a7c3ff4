// vampire: command-line front end.
//
// Exit codes: 0 success, 1 usage / unreadable or malformed input,
// 2 domain error (timing violations, rank-deficient fits, lint failures).

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vampire/vampire.hpp"

namespace fs = std::filesystem;
using namespace vampire;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;

// Thrown for bad flag values the parser itself cannot see.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const char* kFormats = R"(File formats:
  trace       one command per line: cycle,KIND[,bank[,row|column[,payload]]]
              KIND in ACT PRE PREA RD WR REF PDE PDX END; cycles are DRAM
              clocks; payload is 128 lowercase hex digits (64 bytes); '#'
              starts a comment
  profile     key = value lines, units in key names (idd0_ma, trcd_ns, vdd_v);
              '--profile' takes a path, a name under $VAMPIRE_PROFILE_DIR
              (with or without .prof) or a built-in name (vendorA/B/C)
  samples     CSV with header n_ones,n_toggles,current_ma
  points      CSV with header mts,current_ma
Exit codes: 0 ok, 1 usage or input error, 2 domain error.)";

VendorProfile resolve_profile(const std::string& where) {
  if (fs::is_regular_file(where)) return load_profile(where);
  if (const char* dir = std::getenv("VAMPIRE_PROFILE_DIR"); dir && *dir) {
    for (const auto& candidate : {fs::path(dir) / where, fs::path(dir) / (where + ".prof")})
      if (fs::is_regular_file(candidate)) return load_profile(candidate.string());
  }
  if (auto p = builtin_profile(where)) return *p;
  throw IoError("cannot find profile '" + where + "' (not a file, not in $VAMPIRE_PROFILE_DIR, not built in)");
}

// Parses "a,b" into a distribution.
DataDistribution parse_distribution(const std::string& text) {
  auto parts = detail::split(text, ',');
  DataDistribution d;
  try {
    if (parts.size() != 2) throw std::invalid_argument("");
    d.ones_fraction = std::stod(std::string(parts[0]));
    d.toggle_fraction = std::stod(std::string(parts[1]));
  } catch (const std::exception&) {
    throw UsageError("--distribution expects ONES,TOGGLES fractions, got '" + text + "'");
  }
  if (!d.valid()) throw UsageError("--distribution fractions must lie in [0, 1]");
  return d;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw IoError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// Runs `fn` over every input on its own thread; results keep input order.
template <typename T, typename Fn>
std::vector<T> fan_out(const std::vector<std::string>& inputs, Fn fn) {
  std::vector<std::future<T>> jobs;
  for (const auto& in : inputs) jobs.push_back(std::async(std::launch::async, fn, in));
  std::vector<T> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

struct EngineFlags {
  std::string profile = "vendorA";
  bool no_variation = false;
  bool force = false;
  bool interpolate = false;
  std::string distribution;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--profile", profile, "profile path or name")->capture_default_str();
    cmd->add_flag("--no-variation", no_variation, "disable bank/row variation factors");
    cmd->add_flag("--force", force, "score traces that violate timing");
    cmd->add_flag("--interpolate-background", interpolate,
                  "scale active standby between IDD2N and IDD3N by open-bank count");
    cmd->add_option("--distribution", distribution,
                    "ONES,TOGGLES fractions used instead of payload data");
  }
  TraceMode mode() const { return distribution.empty() ? TraceMode::Payload : TraceMode::Distribution; }
  EnergyOptions options() const {
    EnergyOptions o;
    o.variation = !no_variation;
    o.force = force;
    o.interpolate_background = interpolate;
    if (!distribution.empty()) o.distribution = parse_distribution(distribution);
    return o;
  }
};

void print_violations(std::ostream& os, const std::string& path, const std::vector<Violation>& v) {
  for (const auto& x : v) os << path << ": " << x.describe() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven DRAM energy model with data dependency and structural variation"};
  app.footer(kFormats);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every verb");

  std::string out_path;
  bool gnuplot = false;
  auto common = [&](CLI::App* cmd, bool plot = true) {
    cmd->footer(kFormats);
    cmd->add_option("--out,-o", out_path, "write results here instead of stdout");
    if (plot) cmd->add_flag("--gnuplot", gnuplot, "whitespace-separated plot data");
  };

  // validate-trace
  auto* validate = app.add_subcommand("validate-trace", "check a trace for parse and timing errors");
  std::string validate_trace;
  std::string validate_profile = "vendorA";
  bool validate_distribution = false;
  validate->add_option("--trace,trace", validate_trace, "trace file")->required();
  validate->add_option("--profile", validate_profile, "profile supplying timings")->capture_default_str();
  validate->add_flag("--distribution-mode", validate_distribution, "accept RD/WR without payload");
  common(validate, false);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "energy breakdown per trace");
  std::vector<std::string> analyze_traces;
  std::string ledger_path;
  EngineFlags analyze_flags;
  analyze->add_option("--trace,traces", analyze_traces, "trace file(s)")->required();
  analyze->add_option("--ledger", ledger_path, "per-command ledger CSV (single trace only)");
  analyze_flags.add_to(analyze);
  common(analyze);

  // compare
  auto* compare = app.add_subcommand("compare", "compare models against this model per trace");
  std::vector<std::string> compare_traces;
  std::vector<std::string> compare_models{"vampire", "micron", "drampower"};
  EngineFlags compare_flags;
  compare->add_option("--trace,traces", compare_traces, "trace file(s)")->required();
  compare->add_option("--models", compare_models, "vampire, micron, drampower")
      ->delimiter(',')
      ->capture_default_str();
  compare_flags.add_to(compare);
  common(compare);

  // fit
  auto* fit = app.add_subcommand("fit", "least-squares fit of I_zero, dI_one, dI_toggle");
  std::string fit_samples;
  std::string fit_mode = "full";
  fit->add_option("--samples,samples", fit_samples, "calibration CSV")->required();
  fit->add_option("--mode", fit_mode, "full, ones or toggles")
      ->check(CLI::IsMember({"full", "ones", "toggles"}))
      ->capture_default_str();
  common(fit);

  // extrapolate-idd
  auto* extrap = app.add_subcommand("extrapolate-idd", "linear I-f fit evaluated at a target rate");
  std::string extrap_points;
  double extrap_target = 800.0;
  extrap->add_option("--points,points", extrap_points, "frequency CSV")->required();
  extrap->add_option("--target", extrap_target, "target MT/s")->capture_default_str();
  common(extrap);

  // encode
  auto* encode = app.add_subcommand("encode", "encoding study or rewritten trace");
  std::string encode_trace_path;
  std::vector<std::string> encode_schemes{"baseline", "bdi", "optimized", "owi"};
  double encode_energy = 0.0;
  std::uint64_t encode_latency = 1;
  bool emit_trace = false;
  EngineFlags encode_flags;
  encode->add_option("--trace,trace", encode_trace_path, "payload trace")->required();
  encode->add_option("--scheme,--schemes", encode_schemes, "baseline, bdi, optimized, owi")
      ->delimiter(',')
      ->capture_default_str();
  encode->add_option("--encoding-energy", encode_energy, "nJ per access for codebook schemes")
      ->capture_default_str();
  encode->add_option("--latency", encode_latency, "extra cycles per access for codebook schemes")
      ->capture_default_str();
  encode->add_flag("--emit-trace", emit_trace, "print the rewritten trace (one scheme)");
  encode_flags.add_to(encode);
  common(encode);

  // gen-idd-loop
  auto* gen = app.add_subcommand("gen-idd-loop", "emit a JEDEC-style IDD measurement loop");
  std::string gen_kind;
  std::string gen_profile = "vendorA";
  int gen_iterations = 100;
  std::string gen_pattern = "33";
  gen->add_option("--kind,kind", gen_kind, "IDD0 IDD1 IDD2N IDD3N IDD4R IDD4W IDD5B IDD7 IDD2P1")
      ->required();
  gen->add_option("--profile", gen_profile, "profile supplying timings")->capture_default_str();
  gen->add_option("--iterations", gen_iterations, "loop iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--pattern", gen_pattern, "data byte in hex")->capture_default_str();
  common(gen, false);

  // profile-lint, and the `profile` group
  auto* lint = app.add_subcommand("profile-lint", "check a profile's invariants");
  std::string lint_profile_arg;
  lint->add_option("--profile,profile", lint_profile_arg, "profile path or name")->required();
  common(lint, false);

  auto* profile = app.add_subcommand("profile", "profile utilities");
  profile->require_subcommand(1);
  std::string profile_arg;
  auto* plint = profile->add_subcommand("lint", "check a profile's invariants");
  plint->add_option("--profile,profile", profile_arg, "profile path or name")->required();
  common(plint, false);
  auto* pshow = profile->add_subcommand("show", "print a profile in file format");
  pshow->add_option("--profile,profile", profile_arg, "profile path or name")->required();
  common(pshow, false);
  auto* pguard = profile->add_subcommand("guardband", "measured/datasheet ratio per IDD");
  pguard->add_option("--profile,profile", profile_arg, "profile path or name")->required();
  common(pguard);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    Output out(out_path);
    std::ostream& os = out.stream();
    const char sep = gnuplot ? ' ' : ',';
    const std::string comment = gnuplot ? "# " : "";

    if (*validate) {
      const auto p = resolve_profile(validate_profile);
      const auto trace = load_trace(validate_trace, validate_distribution ? TraceMode::Distribution
                                                                          : TraceMode::Payload);
      const auto v = validate_timing(trace, p.timings);
      print_violations(os, validate_trace, v);
      if (!v.empty()) {
        std::cerr << validate_trace << ": " << v.size() << " timing violation(s)\n";
        return kExitDomain;
      }
      return kExitOk;
    }

    if (*analyze) {
      if (!ledger_path.empty() && analyze_traces.size() != 1)
        throw UsageError("--ledger needs exactly one trace");
      const auto p = resolve_profile(analyze_flags.profile);
      const auto opt = analyze_flags.options();
      const auto mode = analyze_flags.mode();
      auto results = fan_out<EnergyBreakdown>(analyze_traces, [&](const std::string& path) {
        try {
          return compute_energy(load_trace(path, mode), p, opt);
        } catch (const ParseError&) {
          throw;
        } catch (const IoError&) {
          throw;
        } catch (const Error& e) {
          throw Error(path + ": " + e.what());
        }
      });
      if (analyze_traces.size() == 1) {
        write_breakdown_csv(os, results.front(), gnuplot);
      } else {
        os << comment << "trace" << sep << "category" << sep << "energy_nj\n";
        for (std::size_t i = 0; i < results.size(); ++i)
          for (const auto& [name, value] : breakdown_rows(results[i]))
            os << analyze_traces[i] << sep << name << sep << format_number(value) << "\n";
      }
      if (!ledger_path.empty()) {
        Output ledger(ledger_path);
        write_ledger_csv(ledger.stream(), results.front(), gnuplot);
      }
      return kExitOk;
    }

    if (*compare) {
      std::vector<ModelKind> models;
      for (const auto& m : compare_models) {
        auto k = model_kind_from_string(m);
        if (!k) throw UsageError("unknown model '" + m + "'");
        models.push_back(*k);
      }
      const auto p = resolve_profile(compare_flags.profile);
      const auto opt = compare_flags.options();
      const auto mode = compare_flags.mode();
      using Row = std::vector<std::pair<ModelKind, EnergyBreakdown>>;
      auto results = fan_out<std::pair<EnergyBreakdown, Row>>(
          compare_traces, [&](const std::string& path) {
            try {
              const auto trace = load_trace(path, mode);
              auto reference = compute_energy(trace, p, opt);
              Row row;
              for (auto k : models)
                row.emplace_back(k, k == ModelKind::Vampire ? reference
                                                            : compute_baseline(trace, p, k, opt));
              return std::make_pair(std::move(reference), std::move(row));
            } catch (const ParseError&) {
              throw;
            } catch (const IoError&) {
              throw;
            } catch (const Error& e) {
              throw Error(path + ": " + e.what());
            }
          });
      os << comment << "trace" << sep << "model" << sep << "energy_nj" << sep << "avg_power_mw"
         << sep << "relative_error_pct\n";
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& [reference, row] = results[i];
        for (const auto& [kind, b] : row) {
          const double power = b.duration_ns > 0.0 ? compute_power(b) : 0.0;
          const double rel =
              reference.total > 0.0 ? relative_error_pct(b.total, reference.total) : 0.0;
          os << compare_traces[i] << sep << to_string(kind) << sep << format_number(b.total)
             << sep << format_number(power) << sep << format_number(rel) << "\n";
        }
      }
      return kExitOk;
    }

    if (*fit) {
      const auto samples = load_calibration_csv(fit_samples);
      const FitMode mode = fit_mode == "ones"      ? FitMode::OnesOnly
                           : fit_mode == "toggles" ? FitMode::TogglesOnly
                                                   : FitMode::Full;
      const auto r = fit_params(samples, mode);
      const auto err = model_percent_error(r.params, samples);
      os << comment << "i_zero_ma" << sep << "d_one_ma" << sep << "d_toggle_ma" << sep
         << "r_squared" << sep << "max_pct_error" << sep << "mean_pct_error\n";
      os << format_number(r.params.i_zero) << sep << format_number(r.params.d_one) << sep
         << format_number(r.params.d_toggle) << sep << format_number(r.r_squared) << sep
         << format_number(err.max_pct) << sep << format_number(err.mean_pct) << "\n";
      return kExitOk;
    }

    if (*extrap) {
      const auto points = load_frequency_csv(extrap_points);
      const auto r = extrapolate_idd(points, extrap_target);
      os << comment << "target_mts" << sep << "current_ma" << sep << "r_squared\n";
      os << format_number(extrap_target) << sep << format_number(r.current_ma) << sep
         << format_number(r.r_squared) << "\n";
      return kExitOk;
    }

    if (*encode) {
      std::vector<EncodingScheme> schemes;
      for (const auto& s : encode_schemes) {
        auto e = encoding_scheme_from_string(s);
        if (!e) throw UsageError("unknown scheme '" + s + "'");
        schemes.push_back(*e);
      }
      const auto trace = load_trace(encode_trace_path, TraceMode::Payload);
      if (emit_trace) {
        if (schemes.size() != 1) throw UsageError("--emit-trace needs exactly one --scheme");
        std::optional<ByteCodebook> cb;
        if (uses_codebook(schemes.front())) cb = build_codebook(trace);
        os << "# " << to_string(schemes.front()) << " encoding of " << encode_trace_path << "\n"
           << serialize_trace(encode_trace(trace, schemes.front(), cb ? &*cb : nullptr,
                                           encode_latency));
        return kExitOk;
      }
      if (!encode_flags.distribution.empty())
        throw UsageError("encode scores payload data; --distribution does not apply");
      const auto p = resolve_profile(encode_flags.profile);
      StudyOptions so;
      so.latency_cycles = encode_latency;
      so.encoding_energy_nj = encode_energy;
      so.energy = encode_flags.options();
      const auto results = run_encoding_study(trace, p, schemes, so);
      os << comment << "scheme" << sep << "energy_nj" << sep << "ratio_to_baseline\n";
      for (const auto& r : results)
        os << to_string(r.scheme) << sep << format_number(r.breakdown.total) << sep
           << format_number(r.ratio_to_baseline) << "\n";
      return kExitOk;
    }

    if (*gen) {
      auto key = idd_key_from_string(gen_kind);
      if (!key) throw UsageError("unknown IDD loop '" + gen_kind + "'");
      unsigned pattern = 0;
      std::istringstream hex(gen_pattern);
      if (!(hex >> std::hex >> pattern) || !hex.eof() || pattern > 0xff)
        throw UsageError("--pattern expects one byte in hex, got '" + gen_pattern + "'");
      const auto p = resolve_profile(gen_profile);
      IddLoopOptions lo;
      lo.iterations = gen_iterations;
      lo.pattern = static_cast<std::uint8_t>(pattern);
      os << "# " << to_string(*key) << " loop, " << gen_iterations << " iterations, "
         << p.name << " timings\n"
         << serialize_trace(generate_idd_loop(*key, p.timings, lo));
      return kExitOk;
    }

    if (*lint || *plint) {
      const auto& where = *lint ? lint_profile_arg : profile_arg;
      const auto p = resolve_profile(where);
      const auto issues = lint_profile(p);
      for (const auto& m : issues) os << where << ": " << m << "\n";
      if (!p.synthetic.empty()) {
        std::cerr << where << ": note: " << p.synthetic.size()
                  << " field(s) are placeholders pending calibration:";
        for (const auto& s : p.synthetic) std::cerr << " " << s;
        std::cerr << "\n";
      }
      return issues.empty() ? kExitOk : kExitDomain;
    }

    if (*pshow) {
      os << save_profile(resolve_profile(profile_arg));
      return kExitOk;
    }

    if (*pguard) {
      const auto p = resolve_profile(profile_arg);
      os << comment << "idd" << sep << "measured_ma" << sep << "datasheet_ma" << sep << "ratio\n";
      for (const auto& r : guardband_report(p))
        os << to_string(r.key) << sep << format_number(r.measured_ma) << sep
           << format_number(r.datasheet_ma) << sep << format_number(r.ratio) << "\n";
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
