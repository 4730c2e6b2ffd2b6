#pragma once

// Command-line front end. `dispatch` parses argv, evaluates the requested
// catalog entry or user MB integrand and writes a JSON report to `out`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mbeval/catalog.hpp"

namespace mbeval::cli {

using nlohmann::ordered_json;

enum ExitCode { ok = 0, eval_error = 1, verify_failed = 2, usage = 64 };

/// Rounds to `digits` significant digits so the JSON text carries exactly
/// that precision.
inline double round_sig(double v, int digits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
  return std::strtod(buf, nullptr);
}

/// Optional key=value defaults; '#' starts a comment.
struct Config {
  catalog::Options opt;

  static Config load(const std::string& path) {
    Config c;
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::parse, "cannot open config '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
      if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
      auto eq = line.find('=');
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
      };
      if (trim(line).empty()) continue;
      if (eq == std::string::npos) throw Error(ErrorCode::parse, "config line without '=': " + line);
      std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
      try {
        if (key == "tol") c.opt.tol = std::stod(val);
        else if (key == "seed") c.opt.seed = static_cast<unsigned>(std::stoul(val));
        else if (key == "max_order") c.opt.max_order = std::stoi(val);
        else if (key == "max_nodes") c.opt.max_nodes = std::stoll(val);
        else throw Error(ErrorCode::parse, "unknown config key '" + key + "'");
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::parse, "bad value for '" + key + "'");
      }
    }
    return c;
  }
};

using Evaluator = std::function<EvalResult(catalog::Method, const catalog::Options&)>;

/// One parameter point of a catalog entry.
struct Entry {
  std::string id;
  ordered_json params;
  std::vector<catalog::Method> methods;
  Evaluator eval;
  double floor_tol = 0.0;  ///< agreement floor for paths with loose error estimates
};

struct Outcome {
  catalog::Method method;
  std::optional<EvalResult> result;
  std::optional<Error> error;
  double runtime_ms = 0.0;
};

inline Outcome run(const Entry& e, catalog::Method m, const catalog::Options& opt) {
  Outcome o{m, {}, {}, 0.0};
  auto t0 = std::chrono::steady_clock::now();
  try {
    o.result = e.eval(m, opt);
  } catch (const Error& err) {
    o.error = err;
  }
  o.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

/// Failures that mean "this path does not apply here" rather than a wrong value.
inline bool inapplicable(ErrorCode c) {
  return c == ErrorCode::method_unavailable || c == ErrorCode::no_closed_form || c == ErrorCode::no_cover ||
         c == ErrorCode::outside_roc || c == ErrorCode::degenerate_parameters || c == ErrorCode::infeasible;
}

/// Builds the report and decides pass: every pair of successful paths agrees
/// within max(2 * larger error estimate, entry floor, tol).
inline ordered_json report(const Entry& e, const std::vector<Outcome>& outs, double tol, bool timing, bool& pass,
                           bool& failed_eval) {
  ordered_json j;
  j["schema"] = 1;
  j["entry"] = e.id;
  j["params"] = e.params;
  ordered_json results = ordered_json::array();
  std::vector<const Outcome*> good;
  failed_eval = false;
  for (const auto& o : outs) {
    ordered_json r;
    r["method"] = catalog::to_string(o.method);
    if (o.result) {
      r["value"] = round_sig(o.result->value, 15);
      r["abs_err_est"] = round_sig(o.result->abs_err_est, 3);
      if (!o.result->note.empty()) r["note"] = o.result->note;
      good.push_back(&o);
    } else {
      r["error"] = std::string(to_string(o.error->code()));
      r["message"] = o.error->what();
      if (!inapplicable(o.error->code())) failed_eval = true;
    }
    if (timing) r["runtime_ms"] = round_sig(o.runtime_ms, 3);
    results.push_back(r);
  }
  j["results"] = results;
  ordered_json deltas = ordered_json::array();
  pass = !failed_eval;
  for (std::size_t a = 0; a < good.size(); ++a)
    for (std::size_t b = a + 1; b < good.size(); ++b) {
      const auto &ra = *good[a]->result, &rb = *good[b]->result;
      double d = std::abs(ra.value - rb.value);
      double lim = std::max({2 * std::max(ra.abs_err_est, rb.abs_err_est), e.floor_tol, tol});
      bool ok = d <= lim;
      pass = pass && ok;
      deltas.push_back({{"pair", {catalog::to_string(good[a]->method), catalog::to_string(good[b]->method)}},
                        {"delta", round_sig(d, 3)},
                        {"tolerance", round_sig(lim, 3)},
                        {"pass", ok}});
    }
  j["deltas"] = deltas;
  j["pass"] = pass;
  return j;
}

// ---------------------------------------------------------------------------
// Entry builders

inline std::vector<catalog::Method> all_methods() {
  using M = catalog::Method;
  return {M::closed, M::contour, M::series, M::oracle};
}

inline std::string join(const std::vector<Rational>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_rational(v[i]);
  return s;
}

inline std::vector<Rational> parse_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_rational(item));
  return out;
}

inline Entry ising_entry(int n, int k) {
  return {"ising", {{"n", n}, {"k", k}}, all_methods(),
          [=](catalog::Method m, const catalog::Options& o) { return catalog::ising_c(n, k, m, o); }};
}

inline Entry ising_param_entry(int n, int k, std::vector<Rational> exps) {
  return {"ising-param", {{"n", n}, {"k", k}, {"exponents", join(exps)}}, all_methods(),
          [=](catalog::Method m, const catalog::Options& o) { return catalog::ising_c_param(n, k, exps, m, o); },
          1e-6};
}

inline Entry c5_entry(int k, Rational a, Rational b) {
  return {"c5", {{"k", k}, {"alpha", format_rational(a)}, {"beta", format_rational(b)}}, all_methods(),
          [=](catalog::Method m, const catalog::Options& o) { return catalog::c5_param(k, a, b, m, o); }, 1e-6};
}

inline Entry box_entry(int n, Rational s) {
  return {"box", {{"n", n}, {"s", format_rational(s)}}, all_methods(),
          [=](catalog::Method m, const catalog::Options& o) { return catalog::box_b(n, s, m, o); }};
}

inline Entry delta_entry(int n, Rational s) {
  return {"delta", {{"n", n}, {"s", format_rational(s)}}, all_methods(),
          [=](catalog::Method m, const catalog::Options& o) { return catalog::delta(n, s, m, o); }, 5e-5};
}

inline Entry jellium_entry(int n) {
  return {"jellium", {{"n", n}}, all_methods(),
          [=](catalog::Method m, const catalog::Options& o) { return catalog::jellium(n, m, o); }, 1e-6};
}

inline Entry ruby_entry(catalog::RubyInput in) {
  return {"ruby",
          {{"l", in.l}, {"d", format_rational(in.d)}, {"a", join(in.orders)}, {"R", join(in.radii)}},
          all_methods(),
          [=](catalog::Method m, const catalog::Options& o) { return catalog::ruby(in, m, o); }};
}

inline Entry mb_entry(const std::string& label, const mellin::MBIntegrand& mb, std::map<std::string, Rational> params) {
  ordered_json p = ordered_json::object();
  for (const auto& [k, v] : params) p[k] = format_rational(v);
  auto bound = mellin::bind_params(mb, mellin::param_values(mb, params));
  return {"mb:" + label, p, {catalog::Method::contour, catalog::Method::series},
          [bound](catalog::Method m, const catalog::Options& o) {
            if (m == catalog::Method::contour) return catalog::detail::contour(bound, o);
            if (m == catalog::Method::series) return catalog::detail::series(bound, o);
            throw Error(ErrorCode::method_unavailable, "MB integrands support contour and series");
          }};
}

/// Regression grid for `verify`. Points are chosen so each entry has at
/// least two applicable paths and the suite stays at desk scale.
inline std::vector<Entry> suite(const std::string& name) {
  std::vector<Entry> v;
  auto want = [&](const char* s) { return name == "all" || name == s; };
  auto q = [](const char* s) { return parse_rational(s); };
  if (want("ising"))
    for (int n = 1; n <= 5; ++n)
      for (int k : {0, 1, 2, 3}) {
        if (n >= 3 && k == 0) continue;
        if (n == 5 && k != 1) continue;
        v.push_back(ising_entry(n, k));
      }
  if (want("ising-param")) {
    v.push_back(ising_param_entry(3, 1, {q("1/2"), q("1/3"), q("1/4")}));
    v.push_back(ising_param_entry(4, 1, {q("3/4"), q("5/6"), q("7/8"), q("9/10")}));
  }
  if (want("c5")) {
    v.push_back(c5_entry(1, 1, 1));
    v.push_back(c5_entry(1, q("1/25"), q("1/25")));
  }
  if (want("box"))
    for (int n = 1; n <= 3; ++n)
      for (const char* s : {"-1/2", "1", "2"}) v.push_back(box_entry(n, q(s)));
  if (want("delta"))
    for (int n = 1; n <= 3; ++n) v.push_back(delta_entry(n, 1));
  if (want("jellium")) v.push_back(jellium_entry(3));
  if (want("ruby")) {
    v.push_back(ruby_entry({0, 3, {1, 1}, {1, 1}}));
    v.push_back(ruby_entry({0, q("1/2"), {0}, {1}}));
    v.push_back(ruby_entry({0, 2, {0}, {1}}));
    v.push_back(ruby_entry({0, 2, {}, {}}));
  }
  if (want("mb")) v.push_back(mb_entry("h1", catalog::h1_mb(), {{"a", 1}, {"b", 2}}));
  if (v.empty()) throw Error(ErrorCode::parse, "unknown suite '" + name + "'");
  return v;
}

// ---------------------------------------------------------------------------
// dispatch

/// One line per result and per cross-check.
inline void write_text(std::ostream& out, const ordered_json& r) {
  out << r["entry"].get<std::string>() << ' ' << r["params"].dump() << (r["pass"].get<bool>() ? " pass" : " FAIL") << '\n';
  char buf[128];
  for (const auto& m : r["results"]) {
    if (!m.contains("value")) continue;
    std::snprintf(buf, sizeof buf, "  %-8s %.15g +- %.3g", m["method"].get<std::string>().c_str(), m["value"].get<double>(),
                  m["abs_err_est"].get<double>());
    out << buf << '\n';
  }
  for (const auto& d : r["deltas"]) {
    std::string pair = d["pair"][0].get<std::string>() + "/" + d["pair"][1].get<std::string>();
    std::snprintf(buf, sizeof buf, "  %-17s |d| = %.3g (tol %.3g)", pair.c_str(),
                  d["delta"].get<double>(), d["tolerance"].get<double>());
    out << buf << (d["pass"].get<bool>() ? "" : " FAIL") << '\n';
  }
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mellin-Barnes and method-of-brackets evaluator"};
  app.require_subcommand(1);

  std::string method_name, config_path;
  double tol = 0.0;
  unsigned seed = 0;
  bool all = false, timing = false, json_out = true;
  auto common = [&](CLI::App* c) {
    c->add_option("--method", method_name, "closed|contour|series|oracle")
        ->check(CLI::IsMember({"closed", "contour", "series", "oracle"}));
    c->add_option("--tol", tol, "absolute tolerance (default 1e-8)");
    c->add_option("--seed", seed, "QMC seed (default 0)");
    c->add_option("--config", config_path, "key=value defaults file");
    c->add_flag("--all", all, "evaluate every available method and cross-check");
    c->add_flag("--timing", timing, "include runtime_ms per method");
    c->add_flag("--json,!--no-json", json_out, "emit the JSON report (default on)");
  };

  int n = 0, k = 1, l = 0;
  std::string s_text = "1", exps_text, alpha_text = "1", beta_text = "1", d_text = "1", a_text, r_text, file,
              suite_name = "all";
  std::vector<std::string> params;

  auto* ising = app.add_subcommand("ising", "Ising class integral C_{n,k}");
  ising->add_option("--n", n, "1..5")->required();
  ising->add_option("--k", k, "k >= 0");
  common(ising);

  auto* iparam = app.add_subcommand("ising-param", "C_{n,k} with exponent parameters");
  iparam->add_option("--n", n, "3 or 4")->required();
  iparam->add_option("--k", k);
  iparam->add_option("--exponents", exps_text, "comma separated rationals")->required();
  common(iparam);

  auto* c5 = app.add_subcommand("c5", "C_{5,k}(alpha, beta)");
  c5->add_option("--k", k);
  c5->add_option("--alpha", alpha_text);
  c5->add_option("--beta", beta_text);
  common(c5);

  auto* box = app.add_subcommand("box", "box integral B_n(s)");
  box->add_option("--n", n)->required();
  box->add_option("--s", s_text);
  common(box);

  auto* delta = app.add_subcommand("delta", "box integral Delta_n(s)");
  delta->add_option("--n", n)->required();
  delta->add_option("--s", s_text);
  common(delta);

  auto* jell = app.add_subcommand("jellium", "jellium potential J_n");
  jell->add_option("--n", n)->required();
  common(jell);

  auto* ruby = app.add_subcommand("ruby", "int k^l e^{-kd} prod J_a(kR) dk");
  ruby->add_option("--l", l);
  ruby->add_option("--d", d_text)->required();
  ruby->add_option("--a", a_text, "Bessel orders, comma separated");
  ruby->add_option("--R", r_text, "radii, comma separated");
  common(ruby);

  auto* mb = app.add_subcommand("mb", "user MB integrand from JSON");
  mb->add_option("--file", file)->required();
  mb->add_option("--param", params, "name=value")->allow_extra_args(false);
  common(mb);

  auto* verify = app.add_subcommand("verify", "cross-method verification suite");
  verify->add_option("--suite", suite_name, "all|ising|ising-param|c5|box|delta|jellium|ruby|mb");
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, err, err);
    return code == 0 ? ok : usage;
  }

  try {
    Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
    catalog::Options opt = cfg.opt;
    if (tol > 0) opt.tol = tol;
    for (auto* c : app.get_subcommands())
      if (c->count("--seed")) opt.seed = seed;

    auto emit = [&](const ordered_json& j) {
      if (json_out) out << j.dump(2) << '\n';
      else if (j.contains("reports"))
        for (const auto& r : j["reports"]) write_text(out, r);
      else
        write_text(out, j);
    };
    auto evaluate = [&](const Entry& e) {
      std::vector<Outcome> outs;
      if (!method_name.empty()) {
        outs.push_back(run(e, catalog::parse_method(method_name), opt));
      } else if (all) {
        for (auto m : e.methods) outs.push_back(run(e, m, opt));
      } else {
        for (auto m : e.methods) {
          auto o = run(e, m, opt);
          bool skip = o.error && inapplicable(o.error->code()) && m != e.methods.back();
          if (!skip) {
            outs.push_back(std::move(o));
            break;
          }
        }
      }
      bool pass = false, failed = false;
      auto j = report(e, outs, opt.tol, timing, pass, failed);
      bool any = std::any_of(outs.begin(), outs.end(), [](const Outcome& o) { return o.result.has_value(); });
      for (const auto& o : outs)
        if (o.error) err << catalog::to_string(o.method) << ": " << o.error->what() << '\n';
      return std::tuple{j, pass, failed || !any};
    };

    Entry entry;
    if (app.got_subcommand(verify)) {
      ordered_json j;
      j["schema"] = 1;
      j["suite"] = suite_name;
      ordered_json reports = ordered_json::array();
      bool pass_all = true;
      for (const auto& e : suite(suite_name)) {
        std::vector<Outcome> outs;
        for (auto m : e.methods) outs.push_back(run(e, m, opt));
        bool pass = false, failed = false;
        auto r = report(e, outs, opt.tol, timing, pass, failed);
        int applicable = static_cast<int>(
            std::count_if(outs.begin(), outs.end(), [](const Outcome& o) { return o.result.has_value(); }));
        if (applicable < 2) {
          r["pass"] = pass = false;
          err << e.id << " " << e.params.dump() << ": fewer than two applicable methods\n";
        }
        if (!pass) err << "FAIL " << e.id << " " << e.params.dump() << '\n';
        pass_all = pass_all && pass;
        reports.push_back(r);
      }
      j["reports"] = reports;
      j["pass"] = pass_all;
      emit(j);
      return pass_all ? ok : verify_failed;
    }
    if (app.got_subcommand(ising)) entry = ising_entry(n, k);
    else if (app.got_subcommand(iparam)) entry = ising_param_entry(n, k, parse_list(exps_text));
    else if (app.got_subcommand(c5)) entry = c5_entry(k, parse_rational(alpha_text), parse_rational(beta_text));
    else if (app.got_subcommand(box)) entry = box_entry(n, parse_rational(s_text));
    else if (app.got_subcommand(delta)) entry = delta_entry(n, parse_rational(s_text));
    else if (app.got_subcommand(jell)) entry = jellium_entry(n);
    else if (app.got_subcommand(ruby)) {
      catalog::RubyInput in{l, parse_rational(d_text), parse_list(a_text), parse_list(r_text)};
      entry = ruby_entry(in);
    } else if (app.got_subcommand(mb)) {
      std::ifstream f(file);
      if (!f) throw Error(ErrorCode::parse, "cannot open '" + file + "'");
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse, e.what());
      }
      std::map<std::string, Rational> named;
      for (const auto& p : params) {
        auto eq = p.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::parse, "expected name=value, got '" + p + "'");
        named[p.substr(0, eq)] = parse_rational(p.substr(eq + 1));
      }
      entry = mb_entry(file, mellin::from_json(doc), named);
    }
    auto [j, pass, failed] = evaluate(entry);
    emit(j);
    if (failed) return eval_error;
    return pass ? ok : verify_failed;
  } catch (const Error& e) {
    ordered_json j{{"schema", 1}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (json_out) out << j.dump(2) << '\n';
    err << e.what() << '\n';
    return e.code() == ErrorCode::parse ? usage : eval_error;
  }
}

}  // namespace mbeval::cli
