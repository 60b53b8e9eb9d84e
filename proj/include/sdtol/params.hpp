#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdtol/error.hpp"

namespace sdtol {

// Deviation component kinds. rx/ry/rz are small rotations (rad), tx/ty/tz small
// translations (mm), ra a radius deviation for cylinders (mm).
enum class Kind { rx, ry, rz, tx, ty, tz, ra };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::rx: return "rx";
    case Kind::ry: return "ry";
    case Kind::rz: return "rz";
    case Kind::tx: return "tx";
    case Kind::ty: return "ty";
    case Kind::tz: return "tz";
    case Kind::ra: return "ra";
  }
  return "?";
}

inline std::optional<Kind> kind_from_name(const std::string& s) {
  static const std::map<std::string, Kind> table = {
      {"rx", Kind::rx}, {"ry", Kind::ry}, {"rz", Kind::rz}, {"tx", Kind::tx},
      {"ty", Kind::ty}, {"tz", Kind::tz}, {"ra", Kind::ra}};
  auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

inline bool is_rotation(Kind k) { return k == Kind::rx || k == Kind::ry || k == Kind::rz; }
inline bool is_translation(Kind k) { return k == Kind::tx || k == Kind::ty || k == Kind::tz; }

// Who owns a defect parameter:
//   dm   machining deviation of a produced (or raw) surface
//   dh   part-holder surface deviation in a set-up
//   lhp  free part/holder link left by a floating contact
//   lgp  functional-gauge residual mobility / link
//   lmgp manufacturing-gauge residual mobility / link
enum class ParamCategory { dm, dh, lhp, lgp, lmgp };

inline const char* category_name(ParamCategory c) {
  switch (c) {
    case ParamCategory::dm: return "DM";
    case ParamCategory::dh: return "DH";
    case ParamCategory::lhp: return "LHP";
    case ParamCategory::lgp: return "LGP";
    case ParamCategory::lmgp: return "LMGP";
  }
  return "?";
}

struct Interval {
  double lower = 0, upper = 0;
  bool valid() const { return lower <= upper; }
};

using ParamId = int;

struct DefectParameter {
  ParamId id = -1;
  std::string name;           // canonical, unique
  Kind kind = Kind::rx;
  int surface = -1;           // part surface the parameter is attached to (-1: none)
  int setup = 0;              // producing / positioning set-up (0 for raw & functional gauge)
  ParamCategory category = ParamCategory::dm;
  std::optional<Interval> bounds;  // never set for gauge links
};

// Canonical names. Machined/raw surface deviations read kind_i; positioning-related
// parameters kind_iSj; floating links prefix l; gauge links prefix lg / lmg with the
// gauge tag instead of iSj; zone offsets use the lgz / lmgz prefixes.
inline std::string dm_name(Kind k, int surface) {
  return std::string(kind_name(k)) + "_" + std::to_string(surface);
}
inline std::string dh_name(Kind k, int surface, int setup) {
  return std::string(kind_name(k)) + "_" + std::to_string(surface) + "S" + std::to_string(setup);
}
inline std::string lhp_name(Kind k, int surface, int setup) {
  return "l" + dh_name(k, surface, setup);
}
inline std::string gauge_link_name(ParamCategory cat, Kind k, const std::string& tag) {
  return std::string(cat == ParamCategory::lmgp ? "lmg" : "lg") + kind_name(k) + "_" + tag;
}
inline std::string zone_offset_name(ParamCategory cat, Kind k, const std::string& tag) {
  return std::string(cat == ParamCategory::lmgp ? "lmgz" : "lgz") + kind_name(k) + "_" + tag;
}

struct ParsedName {
  ParamCategory category = ParamCategory::dm;
  Kind kind = Kind::rx;
  bool zone_offset = false;
  int surface = -1;  // dm/dh/lhp only
  int setup = -1;    // dh/lhp only
  std::string gauge_tag;  // lgp/lmgp only
};

// Lossless inverse of the naming scheme above. Returns nullopt for foreign names.
inline std::optional<ParsedName> parse_param_name(const std::string& name) {
  ParsedName out;
  std::string rest = name;
  auto strip = [&rest](const std::string& p) {
    if (rest.rfind(p, 0) == 0) {
      rest = rest.substr(p.size());
      return true;
    }
    return false;
  };
  bool gauge = false;
  if (strip("lmgz")) { out.category = ParamCategory::lmgp; out.zone_offset = true; gauge = true; }
  else if (strip("lgz")) { out.category = ParamCategory::lgp; out.zone_offset = true; gauge = true; }
  else if (strip("lmg")) { out.category = ParamCategory::lmgp; gauge = true; }
  else if (strip("lg")) { out.category = ParamCategory::lgp; gauge = true; }
  else if (strip("l")) { out.category = ParamCategory::lhp; }
  if (rest.size() < 2) return std::nullopt;
  auto k = kind_from_name(rest.substr(0, 2));
  if (!k) return std::nullopt;
  out.kind = *k;
  rest = rest.substr(2);
  if (rest.empty() || rest[0] != '_') return std::nullopt;
  rest = rest.substr(1);
  if (gauge) {
    if (rest.empty()) return std::nullopt;
    out.gauge_tag = rest;
    return out;
  }
  // iSj or plain i
  auto s_pos = rest.find('S');
  auto all_digits = [](const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  if (s_pos == std::string::npos) {
    if (out.category == ParamCategory::lhp) return std::nullopt;  // links always carry Sj
    if (!all_digits(rest)) return std::nullopt;
    out.category = ParamCategory::dm;
    out.surface = std::stoi(rest);
    return out;
  }
  const std::string i = rest.substr(0, s_pos), j = rest.substr(s_pos + 1);
  if (!all_digits(i) || !all_digits(j)) return std::nullopt;
  if (out.category != ParamCategory::lhp) out.category = ParamCategory::dh;
  out.surface = std::stoi(i);
  out.setup = std::stoi(j);
  return out;
}

class ParameterRegistry {
 public:
  ParamId add(DefectParameter p) {
    if (by_name_.count(p.name))
      throw DuplicateParameter("parameter already registered: " + p.name);
    if ((p.category == ParamCategory::lgp || p.category == ParamCategory::lmgp) && p.bounds)
      throw Error("gauge link parameters carry no bounds: " + p.name);
    p.id = static_cast<ParamId>(params_.size());
    by_name_[p.name] = p.id;
    params_.push_back(std::move(p));
    return params_.back().id;
  }

  const DefectParameter& at(ParamId id) const {
    if (id < 0 || id >= static_cast<ParamId>(params_.size()))
      throw MissingParameter("unknown parameter id " + std::to_string(id));
    return params_[id];
  }

  std::optional<ParamId> find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  ParamId require(const std::string& name) const {
    auto id = find(name);
    if (!id) throw MissingParameter("unknown parameter name: " + name);
    return *id;
  }

  void set_bounds(ParamId id, Interval iv) {
    auto& p = params_.at(id);
    if (p.category == ParamCategory::lgp || p.category == ParamCategory::lmgp)
      throw Error("gauge link parameters carry no bounds: " + p.name);
    if (!iv.valid()) throw Error("invalid bounds for " + p.name);
    p.bounds = iv;
  }

  int size() const { return static_cast<int>(params_.size()); }
  const std::vector<DefectParameter>& all() const { return params_; }

 private:
  std::vector<DefectParameter> params_;
  std::map<std::string, ParamId> by_name_;
};

}  // namespace sdtol
