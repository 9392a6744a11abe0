#include "memheat/summary.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace memheat {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json maybe(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>) return number(*v);
  else return json(*v);
}

json params(const Summary::Params& p) {
  json o = json::object();
  for (const auto& [k, v] : p) o[k] = number(v);
  return o;
}

}  // namespace

std::string to_json(const Summary& s) {
  json j;
  j["preset"] = s.preset;
  j["kernel"] = {{"family", s.kernel.family},
                 {"params", params(s.kernel.params)},
                 {"l", number(s.kernel.l)},
                 {"p", maybe(s.kernel.p)}};
  j["energy"] = {{"E0", number(s.energy.E0)}, {"E_final", number(s.energy.E_final)}};
  j["envelope"] = {{"kind", s.envelope.kind},
                   {"lambda0", number(s.envelope.lambda0)},
                   {"lambda1", number(s.envelope.lambda1)},
                   {"margin", number(s.envelope.margin)}};
  j["fit"] = {{"model", s.fit.model},
              {"params", params(s.fit.params)},
              {"window", json::array({number(s.fit.window_start), number(s.fit.window_end)})},
              {"residual", number(s.fit.residual)}};
  j["checks"] = {{"monotone", s.checks.monotone},
                 {"dissipation_ratio", maybe(s.checks.dissipation_ratio)},
                 {"k0", maybe(s.checks.k0)},
                 {"integrable", maybe(s.checks.integrable)},
                 {"energy_integral_tail", number(s.checks.energy_integral_tail)}};
  return j.dump(2) + "\n";
}

std::vector<std::string> validate_summary(const std::string& text) {
  std::vector<std::string> errs;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    errs.push_back(std::string("not JSON: ") + e.what());
    return errs;
  }
  enum class T { String, Number, NumberOrNull, Bool, BoolOrNull, Object, Window };
  auto check = [&](const json& parent, const std::string& path, const char* key, T type) {
    if (!parent.is_object() || !parent.contains(key)) {
      errs.push_back("missing " + path + key);
      return;
    }
    const json& v = parent.at(key);
    bool ok = false;
    switch (type) {
      case T::String: ok = v.is_string(); break;
      case T::Number: ok = v.is_number(); break;
      case T::NumberOrNull: ok = v.is_number() || v.is_null(); break;
      case T::Bool: ok = v.is_boolean(); break;
      case T::BoolOrNull: ok = v.is_boolean() || v.is_null(); break;
      case T::Object: ok = v.is_object(); break;
      case T::Window: ok = v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(); break;
    }
    if (!ok) errs.push_back("wrong type for " + path + key);
  };
  check(j, "", "preset", T::String);
  for (const char* sec : {"kernel", "energy", "envelope", "fit", "checks"}) check(j, "", sec, T::Object);
  if (!errs.empty()) return errs;
  const json& k = j["kernel"];
  check(k, "kernel.", "family", T::String);
  check(k, "kernel.", "params", T::Object);
  check(k, "kernel.", "l", T::Number);
  check(k, "kernel.", "p", T::NumberOrNull);
  check(j["energy"], "energy.", "E0", T::Number);
  check(j["energy"], "energy.", "E_final", T::Number);
  const json& e = j["envelope"];
  check(e, "envelope.", "kind", T::String);
  if (e.contains("kind") && e["kind"].is_string()) {
    const auto kind = e["kind"].get<std::string>();
    if (kind != "Exponential" && kind != "GeneralPolynomial" && kind != "OptimalPolynomial") {
      errs.push_back("envelope.kind '" + kind + "' is not an envelope kind");
    }
  }
  check(e, "envelope.", "lambda0", T::Number);
  check(e, "envelope.", "lambda1", T::Number);
  check(e, "envelope.", "margin", T::Number);
  const json& f = j["fit"];
  check(f, "fit.", "model", T::String);
  check(f, "fit.", "params", T::Object);
  check(f, "fit.", "window", T::Window);
  check(f, "fit.", "residual", T::NumberOrNull);
  const json& c = j["checks"];
  check(c, "checks.", "monotone", T::Bool);
  check(c, "checks.", "dissipation_ratio", T::NumberOrNull);
  check(c, "checks.", "k0", T::NumberOrNull);
  check(c, "checks.", "integrable", T::BoolOrNull);
  check(c, "checks.", "energy_integral_tail", T::Number);
  return errs;
}

}  // namespace memheat
