// hsl: command-line front end for the Hermitian Schottky library.
//
//   hsl enumerate --lattice 1 --norm 2
//   hsl coeff --kind deriv --matrix '[[["2","0"],...]]' --m 1 --alpha '[4,0,0]'
//   hsl verify --suite all --output report.json
//   hsl m-table --trace-bound 6 --output mtable.jsonl
//   hsl numeric-check
//
// Exit codes: 0 pass, 1 verification failure or runtime error, 2 usage error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsl/deriv.hpp"
#include "hsl/engine.hpp"
#include "hsl/forms.hpp"
#include "hsl/numeric.hpp"
#include "hsl/theta.hpp"
#include "hsl/verify.hpp"

namespace {

using hsl::Json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  unsigned threads = 0;
  std::string cache_dir;
  bool no_cache = false;
  std::string output;
};

std::optional<std::filesystem::path> resolve_cache_dir(const Options& o) {
  if (o.no_cache) return std::nullopt;
  if (!o.cache_dir.empty()) return std::filesystem::path(o.cache_dir);
  if (const char* env = std::getenv("HSL_CACHE_DIR"); env != nullptr && *env != '\0')
    return std::filesystem::path(env);
  return std::filesystem::path("cache");
}

hsl::EngineConfig engine_config(const Options& o) { return {o.threads, resolve_cache_dir(o)}; }

void emit(const Options& o, const std::string& text) {
  if (o.output.empty() || o.output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(o.output);
  if (!os) throw std::runtime_error("cannot write " + o.output);
  os << text;
}

Json parse_json_arg(const std::string& what, const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError(what + ": malformed JSON (" + e.what() + ")");
  }
}

std::string gauss_text(const hsl::GaussInt& z) {
  if (z.im == 0) return z.re.str();
  return z.re.str() + (z.im < 0 ? "-" : "+") + hsl::BigInt(abs(z.im)).str() + "i";
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

int cmd_enumerate(const Options& o, int lattice, std::int64_t norm) {
  if (lattice < 1 || lattice > 3) throw UsageError("lattice must be 1, 2 or 3");
  if (norm < 0) throw UsageError("norm must be nonnegative");
  hsl::Engine engine(engine_config(o));
  Json j;
  j["lattice"] = lattice;
  j["norm"] = norm;
  if (norm % 2 != 0) {
    j["count"] = 0;
    j["note"] = "the lattice is even: odd norms are empty";
  } else {
    const auto& shell = engine.lattice(lattice).shell(norm);
    j["count"] = shell.size();
    if (const auto dir = resolve_cache_dir(o)) j["cache"] = hsl::shell_cache_path(*dir, lattice, norm).string();
  }
  emit(o, j.dump() + "\n");
  return kExitPass;
}

int cmd_coeff(const Options& o, const std::string& kind, int lattice, const std::string& matrix, std::int64_t m,
              const std::string& alpha, const std::string& side) {
  const Json mj = parse_json_arg("--matrix", matrix);
  hsl::Engine engine(engine_config(o));
  Json out;
  out["kind"] = kind;
  if (kind == "theta" || kind == "f") {
    const hsl::DoubledIndex t = hsl::DoubledIndex::from_json(mj);
    out["T"] = t.to_json();
    hsl::BigInt v;
    if (kind == "theta") {
      if (lattice < 1 || lattice > 3) throw UsageError("theta needs --lattice 1, 2 or 3");
      out["lattice"] = lattice;
      v = hsl::rep_count(engine, lattice, t);
    } else {
      out["combo"] = hsl::Combo::schottky().to_json();
      v = hsl::combo_coeff(engine, hsl::Combo::schottky(), t);
    }
    out["value"] = v.str();
    out["normalization"] = "representation-number";
  } else if (kind == "deriv") {
    const hsl::DoubledIndex t = hsl::DoubledIndex::from_json(mj);
    const hsl::MultiIndex a = hsl::MultiIndex::from_json(parse_json_arg("--alpha", alpha));
    if (side != "x" && side != "y") throw UsageError("--side must be x or y");
    hsl::DerivEngine d(engine);
    const hsl::GaussInt v = side == "x" ? hsl::tuple_sum_x(d, t, m, a) : hsl::tuple_sum_y(d, t, m, a);
    out["T1"] = t.to_json();
    out["m"] = m;
    out["alpha"] = a.to_json();
    out["side"] = side;
    out["value"] = gauss_text(v);
    out["exact"] = hsl::to_json(v);
    out["normalization"] = "tuple-sum";
    const hsl::GaussRat f(v, hsl::BigInt(1) << a.r());
    const std::string num = f.num().im == 0 || f.den() == 1 ? gauss_text(f.num()) : "(" + gauss_text(f.num()) + ")";
    out["fourier_coeff"] = f.den() == 1 ? num : num + "/" + f.den().str();
    out["symbolic_factor"] = "(2 pi i)^" + std::to_string(a.r());
  } else {
    throw UsageError("--kind must be theta, f or deriv");
  }
  emit(o, out.dump() + "\n");
  return kExitPass;
}

hsl::VerifyBounds check_bounds(const hsl::VerifyBounds& b) {
  for (const std::int64_t t : {b.lowdeg_n2_trace, b.lowdeg_n3_trace, b.cusp_trace, b.relations_trace, b.h2h2_trace})
    if (t <= 0 || t % 2 != 0) throw UsageError("trace bounds must be positive and even");
  if (b.theta_m_max <= 0 || b.lowdeg_n1_m_max <= 0 || b.numeric_n1_B <= 0) throw UsageError("bounds must be positive");
  return b;
}

int write_report(const Options& o, const hsl::Report& r) {
  Json doc;
  doc["header"] = Json::object({{"generated", utc_now()}, {"threads", hsl::resolve_threads(o.threads)}});
  doc["report"] = r.to_json();
  emit(o, doc.dump(2) + "\n");
  std::cerr << r.suite << ": " << (r.checks.size() - r.failures()) << "/" << r.checks.size() << " checks passed\n";
  return r.pass() ? kExitPass : kExitFail;
}

int cmd_verify(const Options& o, const std::string& suite, const hsl::VerifyBounds& b) {
  if (suite != "all" && std::find(hsl::suite_names().begin(), hsl::suite_names().end(), suite) == hsl::suite_names().end())
    throw UsageError("unknown suite " + suite);
  hsl::Engine engine(engine_config(o));
  return write_report(o, hsl::run_suite(engine, suite, check_bounds(b)));
}

int cmd_m_table(const Options& o, std::int64_t trace_bound, const std::string& alphas) {
  if (trace_bound <= 0 || trace_bound % 2 != 0) throw UsageError("--trace-bound must be positive and even");
  std::vector<hsl::MultiIndex> list;
  if (alphas.empty()) {
    list = hsl::multi_indices(4);
  } else {
    const Json j = parse_json_arg("--alpha", alphas);
    if (!j.is_array()) throw UsageError("--alpha must be a JSON array of triples");
    for (const auto& a : j) list.push_back(hsl::MultiIndex::from_json(a));
  }
  hsl::Engine engine(engine_config(o));
  hsl::DerivEngine d(engine);
  const hsl::MCoeffTable table = hsl::m_table(d, trace_bound, list);
  std::ostringstream os;
  table.write(os);
  emit(o, os.str());
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermitian theta series, the Schottky combination and its derivative coefficients"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--cache-dir", o.cache_dir, "shell cache directory (default ./cache or $HSL_CACHE_DIR)");
  app.add_flag("--no-cache", o.no_cache, "do not read or write shell caches");
  app.add_option("--output", o.output, "output file (default stdout)");

  int lattice = 0;
  std::int64_t norm = 0;
  auto* en = app.add_subcommand("enumerate", "enumerate a shell and write it to the cache");
  en->add_option("--lattice", lattice, "lattice id 1..3")->required();
  en->add_option("--norm", norm, "Hermitian norm")->required();

  std::string kind;
  std::string matrix;
  std::int64_t m = 1;
  std::string alpha = "[4,0,0]";
  std::string side = "x";
  auto* co = app.add_subcommand("coeff", "one exact coefficient");
  co->add_option("--kind", kind, "theta, f or deriv")->required();
  co->add_option("--lattice", lattice, "lattice id for --kind theta");
  co->add_option("--matrix", matrix, "doubled index T = 2h as JSON [[[\"re\",\"im\"],...],...]")->required();
  co->add_option("--m", m, "H_1 index for --kind deriv")->capture_default_str();
  co->add_option("--alpha", alpha, "multi-index for --kind deriv")->capture_default_str();
  co->add_option("--side", side, "x or y")->capture_default_str();

  std::string suite;
  hsl::VerifyBounds bounds;
  auto* ve = app.add_subcommand("verify", "run a verification suite");
  ve->add_option("--suite", suite, "shells, relations, lowdeg, cusp, schottky, mod4, delta-factor, h2h2, numeric, all")
      ->required();
  ve->add_option("--theta-m-max", bounds.theta_m_max)->capture_default_str();
  ve->add_option("--lowdeg-n1-m-max", bounds.lowdeg_n1_m_max)->capture_default_str();
  ve->add_option("--lowdeg-n2-trace", bounds.lowdeg_n2_trace)->capture_default_str();
  ve->add_option("--lowdeg-n3-trace", bounds.lowdeg_n3_trace)->capture_default_str();
  ve->add_option("--cusp-trace", bounds.cusp_trace)->capture_default_str();
  ve->add_option("--cusp-max-diag", bounds.cusp_max_diag)->capture_default_str();
  ve->add_option("--relations-trace", bounds.relations_trace)->capture_default_str();
  ve->add_option("--h2h2-trace", bounds.h2h2_trace)->capture_default_str();
  ve->add_option("--numeric-n1-terms", bounds.numeric_n1_B)->capture_default_str();

  std::int64_t trace_bound = 6;
  std::string alphas;
  auto* mt = app.add_subcommand("m-table", "b(T1, alpha) = tuple_sum_x(T1, 1, alpha) as JSON lines");
  mt->add_option("--trace-bound", trace_bound)->capture_default_str();
  mt->add_option("--alpha", alphas, "JSON list of multi-indices with |alpha| = 4 (default: all)");

  auto* nc = app.add_subcommand("numeric-check", "floating-point checks of the transformation machinery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*en) return cmd_enumerate(o, lattice, norm);
    if (*co) return cmd_coeff(o, kind, lattice, matrix, m, alpha, side);
    if (*ve) return cmd_verify(o, suite, bounds);
    if (*mt) return cmd_m_table(o, trace_bound, alphas);
    if (*nc) {
      hsl::Engine engine(engine_config(o));
      return write_report(o, hsl::run_suite(engine, "numeric"));
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hsl::Error& e) {
    // Malformed input surfaces as one of these; anything else is a runtime failure.
    const bool usage = dynamic_cast<const hsl::FormatError*>(&e) != nullptr ||
                       dynamic_cast<const hsl::InvalidIndex*>(&e) != nullptr ||
                       dynamic_cast<const hsl::InvalidOrder*>(&e) != nullptr ||
                       dynamic_cast<const hsl::UnknownLattice*>(&e) != nullptr ||
                       dynamic_cast<const hsl::DomainError*>(&e) != nullptr;
    std::cerr << (usage ? "usage error: " : "error: ") << e.what() << "\n";
    return usage ? kExitUsage : kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
