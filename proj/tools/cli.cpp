#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_01.hpp>

#include "histtools/bounds.hpp"
#include "histtools/error.hpp"
#include "histtools/gain_study.hpp"
#include "histtools/histogram.hpp"
#include "histtools/ingest.hpp"
#include "histtools/wire.hpp"

namespace histtools::cli {

using nlohmann::json;

namespace {

std::string shortest(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

json number_or_inf(double x) {
  if (std::isinf(x)) return shortest(x);
  return x;
}

double parse_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw histogram_error(errc::parse, what + ": '" + std::string(s) + "' is not a finite number");
  }
  return v;
}

long parse_long(std::string_view s, const std::string& what) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw histogram_error(errc::parse, what + ": '" + std::string(s) + "' is not an integer");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw histogram_error(errc::io, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<double> read_samples(const std::string& path) {
  std::istringstream in(slurp(path));
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    out.push_back(parse_double(std::string_view(line).substr(b, e - b + 1),
                               path + ":" + std::to_string(line_no)));
  }
  return out;
}

Histogram read_histogram(const std::string& path) {
  std::string data = slurp(path);
  try {
    if (data.starts_with(wire::kMagic)) {
      return wire::decode(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
    }
    return wire::from_json(data);
  } catch (const histogram_error& e) {
    throw histogram_error(e.code(), path + ": " + e.what());
  }
}

void write_histogram(const std::string& path, const Histogram& h, const std::string& format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw histogram_error(errc::io, "cannot write '" + path + "'");
  if (format == "json") {
    out << wire::to_json(h, 2) << '\n';
  } else {
    auto bytes = wire::encode(h);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw histogram_error(errc::io, "failed writing '" + path + "'");
}

json summary(const Histogram& h) {
  json j;
  j["bins"] = h.bin_count();
  j["count"] = count(h);
  j["mean"] = count(h) > 0 ? json(approx_mean(h)) : json(nullptr);
  j["moment_order"] = h.moment_order();
  return j;
}

struct Options {
  std::string input;
  std::vector<std::string> inputs;
  std::string out;
  std::string breaks;
  std::string format = "binary";
  std::string name;
  int moments = 0;
  std::string quantiles;
  std::string range;
  bool quadrature = false;
  std::optional<double> m1;
  std::optional<double> var;
  std::optional<int> p;
  std::size_t grid = 101;
  bool strict = false;
  std::size_t shards = 7;
  int method = 1;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::size_t users = 315;
};

int cmd_build(const Options& o, std::ostream& out, std::ostream& err) {
  auto samples = read_samples(o.input);
  auto h = build_histogram(samples, parse_breaks_spec(o.breaks), o.moments);
  if (!o.name.empty()) h = h.with_name(o.name);
  write_histogram(o.out, h, o.format);
  if (count(h) == 0) err << "note: no samples; histogram has count=0\n";
  out << summary(h).dump() << '\n';
  return 0;
}

int cmd_merge(const Options& o, std::ostream& out, std::ostream&) {
  std::optional<Histogram> acc;
  std::string first;
  for (const auto& path : o.inputs) {
    auto h = read_histogram(path);
    if (!acc) {
      acc = std::move(h);
      first = path;
      continue;
    }
    try {
      acc = merge(*acc, h);
    } catch (const histogram_error& e) {
      throw histogram_error(e.code(), "cannot merge '" + path + "' into '" + first + "': " + e.what());
    }
  }
  write_histogram(o.out, *acc, o.format);
  out << summary(*acc).dump() << '\n';
  return 0;
}

int cmd_trim(const Options& o, std::ostream& out, std::ostream& err) {
  auto h = read_histogram(o.input);
  if (count(h) == 0) err << "warning: histogram is all zero; result is a single empty bin\n";
  auto t = trim(h);
  write_histogram(o.out, t, o.format);
  out << summary(t).dump() << '\n';
  return 0;
}

int cmd_stats(const Options& o, std::ostream& out, std::ostream& err) {
  auto h = read_histogram(o.input);
  json j;
  j["count"] = count(h);
  j["bins"] = h.bin_count();
  if (count(h) == 0) {
    err << "warning: empty histogram; mean and quantiles are undefined\n";
    j["mean"] = nullptr;
    j["quantiles"] = nullptr;
    out << j.dump() << '\n';
    return 0;
  }
  j["mean"] = approx_mean(h);
  std::vector<double> qs;
  if (!o.quantiles.empty()) {
    for (auto tok : split(o.quantiles, ',')) qs.push_back(parse_double(tok, "--quantiles"));
  }
  auto values = approx_quantile(h, qs);
  j["quantiles"] = json::array();
  for (std::size_t i = 0; i < qs.size(); ++i) {
    j["quantiles"].push_back({{"q", qs[i]}, {"value", values[i]}});
  }
  out << j.dump() << '\n';
  return 0;
}

int cmd_emdcc(const Options& o, std::ostream& out, std::ostream&) {
  auto h = read_histogram(o.input);
  std::optional<std::pair<double, double>> range;
  if (!o.range.empty()) {
    auto parts = split(o.range, ',');
    if (parts.size() != 2) throw histogram_error(errc::parse, "--range expects lo,hi");
    range = std::pair{parse_double(parts[0], "--range"), parse_double(parts[1], "--range")};
  }
  std::optional<EmdccMethod> force;
  if (o.quadrature) force = EmdccMethod::quadrature;
  auto report = emdcc_histogram(h, range, force);
  json j;
  j["total"] = report.total;
  j["range"] = report.range;
  j["method"] = to_string(report.method);
  j["per_bin"] = json::array();
  for (const auto& b : report.per_bin) {
    j["per_bin"].push_back({{"bin", b.bin},
                            {"weight", b.weight},
                            {"normalized", b.normalized},
                            {"contribution", b.contribution},
                            {"constraint", to_string(b.constraint)}});
  }
  out << j.dump() << '\n';
  return 0;
}

int cmd_gain(const Options& o, std::ostream& out, std::ostream&) {
  out << shortest(information_gain(read_histogram(o.input))) << '\n';
  return 0;
}

int cmd_bounds(const Options& o, std::ostream& out, std::ostream&) {
  if (o.grid < 2) throw histogram_error(errc::domain, "--grid must be >= 2");
  std::optional<CdfBounds> bounds;
  double lo = 0.0;
  double hi = 1.0;
  if (!o.input.empty()) {
    if (o.m1 || o.var || o.p) {
      throw histogram_error(errc::domain, "--input cannot be combined with --m1/--var/--p");
    }
    bounds.emplace(histogram_bounds(read_histogram(o.input)));
    std::tie(lo, hi) = bounds->support();
  } else if (o.var) {
    if (!o.m1) throw histogram_error(errc::domain, "--var requires --m1");
    if (o.p) throw histogram_error(errc::domain, "--var and --p are mutually exclusive");
    bounds.emplace(bounds_mean_var(*o.m1, *o.var));
  } else if (o.p) {
    if (!o.m1) throw histogram_error(errc::domain, "--p requires --m1 (the normalized p-th moment root)");
    bounds.emplace(bounds_pth_moment(*o.m1, *o.p));
  } else if (o.m1) {
    bounds.emplace(bounds_mean(*o.m1));
  } else {
    bounds.emplace(bounds_no_moment());
  }

  std::ostringstream csv;
  csv << "x,lower,upper,regime\n";
  for (std::size_t i = 0; i < o.grid; ++i) {
    double x = i + 1 == o.grid ? hi
                               : lo + (hi - lo) * static_cast<double>(i) /
                                          static_cast<double>(o.grid - 1);
    Regime r = bounds->regime(std::min(x, std::nextafter(hi, lo)));
    csv << shortest(x) << ',' << shortest(bounds->lower(x)) << ',' << shortest(bounds->upper(x))
        << ',' << to_string(r) << '\n';
  }
  if (o.out.empty() || o.out == "-") {
    out << csv.str();
  } else {
    std::ofstream f(o.out, std::ios::trunc);
    if (!f) throw histogram_error(errc::io, "cannot write '" + o.out + "'");
    f << csv.str();
  }
  return 0;
}

int cmd_dtrace(const Options& o, std::ostream& out, std::ostream& err) {
  std::istringstream in(slurp(o.input));
  std::vector<Diagnostic> diags;
  auto hists = parse_dtrace(in, &diags, o.strict);
  for (const auto& d : diags) err << "warning: " << o.input << ":" << d.line << ": " << d.message << '\n';
  for (const auto& nh : hists) out << wire::to_json(nh.histogram) << '\n';
  return 0;
}

int cmd_mapreduce_demo(const Options& o, std::ostream& out, std::ostream&) {
  if (o.method != 1 && o.method != 2) throw histogram_error(errc::domain, "--method must be 1 or 2");
  boost::random::mt19937_64 rng(o.seed);
  boost::random::uniform_01<double> unit;
  auto scheme = BucketScheme::fixed_width(0.0, 1.0, 64);
  std::vector<double> samples(o.samples);
  for (auto& x : samples) {
    double u = unit(rng);
    x = 64.0 * u * u;  // skewed toward small values
  }
  auto method = o.method == 1 ? MapReduceMethod::mapper_histograms : MapReduceMethod::key_value;
  auto got = simulate_mapreduce(samples, scheme, o.shards, method, o.moments);
  auto want = build_histogram(samples, scheme.breaks(), o.moments);

  bool ok = got.counts() == want.counts() && got.breaks() == want.breaks() &&
            got.moment_order() == want.moment_order();
  if (ok && want.moments()) {
    auto g = got.moments()->raw();
    auto w = want.moments()->raw();
    for (std::size_t i = 0; i < w.size() && ok; ++i) {
      ok = std::abs(g[i] - w[i]) <= 1e-12 * std::max(std::abs(w[i]), 1.0);
    }
  }
  out << (ok ? "PASS" : "FAIL") << " shards=" << o.shards << " method=" << o.method
      << " samples=" << o.samples << " count=" << count(got) << '\n';
  return ok ? 0 : 1;
}

int cmd_gain_study(const Options& o, std::ostream& out, std::ostream&) {
  auto study = study::run_gain_study(o.users, o.seed);
  std::ostringstream csv;
  csv << "user,samples,occupied_bins,emdcc_h24_1,emdcc_h48_0,gain\n";
  for (const auto& u : study.users) {
    csv << u.user << ',' << u.samples << ',' << u.occupied_bins << ',' << shortest(u.emdcc_annotated)
        << ',' << shortest(u.emdcc_bisected) << ',' << shortest(u.gain) << '\n';
  }
  if (o.out.empty() || o.out == "-") {
    out << csv.str();
    return 0;
  }
  std::ofstream f(o.out, std::ios::trunc);
  if (!f) throw histogram_error(errc::io, "cannot write '" + o.out + "'");
  f << csv.str();

  const auto& s = study.summary;
  json j;
  j["users"] = study.users.size();
  j["seed"] = o.seed;
  j["min"] = number_or_inf(s.min);
  j["q10"] = number_or_inf(s.q10);
  j["q25"] = number_or_inf(s.q25);
  j["median"] = number_or_inf(s.median);
  j["q75"] = number_or_inf(s.q75);
  j["q90"] = number_or_inf(s.q90);
  j["frac_below_1"] = s.frac_below_1;
  j["frac_above_2_5"] = s.frac_above_2_5;
  j["frac_above_10"] = s.frac_above_10;
  out << j.dump() << '\n';
  return 0;
}

}  // namespace

std::vector<double> parse_breaks_spec(const std::string& spec) {
  std::vector<double> breaks;
  if (spec.starts_with("lin:")) {
    auto parts = split(std::string_view(spec).substr(4), ':');
    if (parts.size() != 3) throw histogram_error(errc::parse, "expected lin:start:stop:n");
    double start = parse_double(parts[0], "lin start");
    double stop = parse_double(parts[1], "lin stop");
    long n = parse_long(parts[2], "lin n");
    if (n < 1) throw histogram_error(errc::invalid_breaks, "lin: n must be >= 1");
    for (long i = 0; i <= n; ++i) {
      breaks.push_back(i == n ? stop : start + (stop - start) * static_cast<double>(i) / static_cast<double>(n));
    }
  } else if (spec.starts_with("log2:")) {
    auto parts = split(std::string_view(spec).substr(5), ':');
    if (parts.size() != 2) throw histogram_error(errc::parse, "expected log2:kmin:kmax");
    long kmin = parse_long(parts[0], "log2 kmin");
    long kmax = parse_long(parts[1], "log2 kmax");
    if (kmin < -1000 || kmax > 1000) throw histogram_error(errc::invalid_breaks, "log2 exponents out of range");
    return BucketScheme::power_of_two(static_cast<int>(kmin), static_cast<int>(kmax)).breaks();
  } else {
    for (auto tok : split(spec, ',')) breaks.push_back(parse_double(tok, "break"));
  }
  validate_breaks(breaks);
  return breaks;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"histtools: moment-annotated histograms and EMDCC information loss", "histtools"};
  app.require_subcommand(1);
  Options o;

  auto* build = app.add_subcommand("build", "build a histogram from a samples file");
  build->add_option("--input", o.input, "samples, one real per line")->required();
  build->add_option("--breaks", o.breaks, "a,b,c | lin:start:stop:n | log2:kmin:kmax")->required();
  build->add_option("--moments", o.moments, "raw moments tracked per bin")->check(CLI::Range(0, 255));
  build->add_option("--out", o.out, "output histogram file")->required();
  build->add_option("--name", o.name, "metric name");

  auto* mergec = app.add_subcommand("merge", "merge histograms with identical breaks");
  mergec->add_option("files", o.inputs)->required();
  mergec->add_option("--out", o.out)->required();

  auto* trimc = app.add_subcommand("trim", "drop leading and trailing empty bins");
  trimc->add_option("file", o.input)->required();
  trimc->add_option("--out", o.out)->required();

  for (auto* sc : {build, mergec, trimc}) {
    sc->add_option("--format", o.format, "binary or json")->check(CLI::IsMember({"binary", "json"}));
  }

  auto* stats = app.add_subcommand("stats", "count, approximate mean and quantiles as JSON");
  stats->add_option("file", o.input)->required();
  stats->add_option("--quantiles", o.quantiles, "comma-separated q values in [0,1]");

  auto* emdcc = app.add_subcommand("emdcc", "EMDCC information loss report as JSON");
  emdcc->add_option("file", o.input)->required();
  emdcc->add_option("--range", o.range, "normalization range lo,hi");
  emdcc->add_flag("--quadrature", o.quadrature, "integrate every bin numerically");

  auto* gain = app.add_subcommand("gain", "information gain 1/(2KX) of a mean-annotated histogram");
  gain->add_option("file", o.input)->required();

  auto* bounds = app.add_subcommand("bounds", "CSV of lower/upper CDF bounds");
  bounds->add_option("--m1", o.m1, "normalized mean (or p-th moment root with --p)");
  bounds->add_option("--var", o.var, "normalized variance");
  bounds->add_option("--p", o.p, "moment order for single p-th moment bounds")->check(CLI::PositiveNumber);
  bounds->add_option("--input", o.input, "histogram file: whole-histogram envelope");
  bounds->add_option("--grid", o.grid, "number of x rows");
  bounds->add_option("--out", o.out, "CSV path (default stdout)");

  auto* dtrace = app.add_subcommand("dtrace", "parse DTrace aggregation output to JSON lines");
  dtrace->add_option("file", o.input)->required();
  dtrace->add_flag("--strict", o.strict, "fail on malformed rows");

  auto* demo = app.add_subcommand("mapreduce-demo", "check shard invariance of MapReduce binning");
  demo->add_option("--shards", o.shards)->check(CLI::PositiveNumber);
  demo->add_option("--method", o.method, "1: mapper histograms, 2: key-value pairs");
  demo->add_option("--samples", o.samples);
  demo->add_option("--seed", o.seed);
  demo->add_option("--moments", o.moments)->check(CLI::Range(0, 255));

  auto* study = app.add_subcommand("gain-study", "synthetic H(24,1) vs H(48,0) information gain study");
  study->add_option("--users", o.users);
  study->add_option("--seed", o.seed);
  study->add_option("--out", o.out, "CSV path; summary JSON then goes to stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (build->parsed()) return cmd_build(o, out, err);
    if (mergec->parsed()) return cmd_merge(o, out, err);
    if (trimc->parsed()) return cmd_trim(o, out, err);
    if (stats->parsed()) return cmd_stats(o, out, err);
    if (emdcc->parsed()) return cmd_emdcc(o, out, err);
    if (gain->parsed()) return cmd_gain(o, out, err);
    if (bounds->parsed()) return cmd_bounds(o, out, err);
    if (dtrace->parsed()) return cmd_dtrace(o, out, err);
    if (demo->parsed()) return cmd_mapreduce_demo(o, out, err);
    if (study->parsed()) return cmd_gain_study(o, out, err);
  } catch (const histogram_error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace histtools::cli
