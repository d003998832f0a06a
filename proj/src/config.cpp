#include "allpay/config.hpp"

#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "allpay/errors.hpp"

namespace allpay {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

double number(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double number_or(const json& j, const std::string& where, const char* key, double fallback) {
  return j.contains(key) ? number(j, where, key) : fallback;
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(where + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

TypeDistribution parse_agent(const json& j, const std::string& where) {
  require_object(j, where);
  allow_keys(j, where, {"family", "params"});
  if (!j.contains("family") || !j.at("family").is_string()) {
    throw ConfigError(where + ": missing string 'family'");
  }
  const std::string family = j.at("family").get<std::string>();
  const json params = j.value("params", json::object());
  const std::string pw = where + ".params";
  require_object(params, pw);

  numerics::Interval support{0.0, 1.0};
  if (params.contains("support")) {
    const std::vector<double> s = numbers(params.at("support"), pw + ".support");
    if (s.size() != 2 || !(s[0] < s[1])) throw ConfigError(pw + ".support: expected [lo, hi] with lo < hi");
    if (s[0] < 0.0) throw ConfigError(pw + ".support: types must be nonnegative");
    support = numerics::Interval(s[0], s[1]);
  }

  std::optional<TypeDistribution> dist;
  if (family == "uniform") {
    allow_keys(params, pw, {"atom", "support"});
    dist = TypeDistribution::uniform(support);
  } else if (family == "atom_uniform") {
    allow_keys(params, pw, {"atom", "support"});
    dist = TypeDistribution::atom_uniform(number(params, pw, "atom"), support);
  } else if (family == "power") {
    allow_keys(params, pw, {"alpha", "atom", "support"});
    dist = TypeDistribution::power(number(params, pw, "alpha"), support);
  } else if (family == "piecewise_polynomial") {
    allow_keys(params, pw, {"breakpoints", "coefficients", "atom", "support"});
    if (!params.contains("breakpoints") || !params.contains("coefficients")) {
      throw ConfigError(pw + ": piecewise_polynomial needs 'breakpoints' and 'coefficients'");
    }
    const json& cj = params.at("coefficients");
    if (!cj.is_array()) throw ConfigError(pw + ".coefficients: expected an array of arrays");
    std::vector<std::vector<double>> coefficients;
    for (const auto& piece : cj) coefficients.push_back(numbers(piece, pw + ".coefficients"));
    dist = TypeDistribution::piecewise_polynomial(numbers(params.at("breakpoints"), pw + ".breakpoints"),
                                                  std::move(coefficients), support);
  } else {
    throw ConfigError(where + ": unknown family '" + family + "'");
  }
  if (params.contains("atom") && family != "atom_uniform") dist = dist->with_atom(number(params, pw, "atom"));
  dist->validate();
  return *dist;
}

ContestSpec parse(const json& root) {
  require_object(root, "config");
  allow_keys(root, "config", {"agents", "payment", "value_scale", "lambda", "numerics"});
  ContestSpec spec;

  if (!root.contains("agents") || !root.at("agents").is_array()) {
    throw ConfigError("config: missing array 'agents'");
  }
  const json& agents = root.at("agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    spec.agents.push_back(parse_agent(agents[i], "agents[" + std::to_string(i) + "]"));
  }

  if (!root.contains("payment")) throw ConfigError("config: missing 'payment'");
  const json& pay = root.at("payment");
  require_object(pay, "payment");
  allow_keys(pay, "payment", {"family", "c", "a", "d"});
  if (pay.value("family", std::string("monomial")) != "monomial") {
    throw ConfigError("payment: only the 'monomial' family c * b^a * v^-d is supported");
  }
  spec.payment = PaymentFunction(number(pay, "payment", "c"), number(pay, "payment", "a"),
                                 number_or(pay, "payment", "d", 0.0));

  if (root.contains("value_scale")) {
    const json& vs = root.at("value_scale");
    require_object(vs, "value_scale");
    allow_keys(vs, "value_scale", {"gamma"});
    spec.value_scale = ValueScale(number(vs, "value_scale", "gamma"));
  } else {
    spec.value_scale = ValueScale(1.0);
  }

  spec.lambda = number(root, "config", "lambda");

  if (root.contains("numerics")) {
    const json& nj = root.at("numerics");
    require_object(nj, "numerics");
    allow_keys(nj, "numerics", {"steps", "abs_tol", "rel_tol"});
    if (nj.contains("steps")) {
      if (!nj.at("steps").is_number_integer()) throw ConfigError("numerics.steps: expected an integer");
      spec.numerics.ode_steps = nj.at("steps").get<int>();
    }
    spec.numerics.abs_tol = number_or(nj, "numerics", "abs_tol", spec.numerics.abs_tol);
    spec.numerics.rel_tol = number_or(nj, "numerics", "rel_tol", spec.numerics.rel_tol);
  }
  spec.numerics.validate();
  spec.validate();
  return spec;
}

json agent_json(const TypeDistribution& d) {
  json params = json::object();
  const auto& s = d.support();
  if (!(s.lo() == 0.0 && s.hi() == 1.0)) params["support"] = {s.lo(), s.hi()};
  std::string family;
  switch (d.family()) {
    case TypeDistribution::Family::Uniform:
      family = d.atom() > 0.0 ? "atom_uniform" : "uniform";
      break;
    case TypeDistribution::Family::Power:
      family = "power";
      params["alpha"] = d.alpha();
      break;
    case TypeDistribution::Family::PiecewisePolynomial:
      family = "piecewise_polynomial";
      params["breakpoints"] = d.breakpoints();
      params["coefficients"] = d.coefficients();
      break;
  }
  if (d.atom() > 0.0) params["atom"] = d.atom();
  return {{"family", family}, {"params", params}};
}

}  // namespace

ContestSpec parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    return parse(root);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ContestSpec load_config(const std::string& source) {
  if (source == kCaseStudyPreset) return paper_case_study(0.1);
  std::ifstream in(source);
  if (!in) throw ConfigError("cannot open config '" + source + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const ContestSpec& spec) {
  json j;
  j["agents"] = json::array();
  for (const auto& a : spec.agents) j["agents"].push_back(agent_json(a));
  j["payment"] = {{"family", "monomial"}, {"c", spec.payment.c()}, {"a", spec.payment.a()}, {"d", spec.payment.d()}};
  j["value_scale"] = {{"gamma", spec.value_scale.gamma()}};
  j["lambda"] = spec.lambda;
  j["numerics"] = {{"steps", spec.numerics.ode_steps},
                   {"abs_tol", spec.numerics.abs_tol},
                   {"rel_tol", spec.numerics.rel_tol}};
  return j.dump(2);
}

}  // namespace allpay
