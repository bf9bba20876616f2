#include "sopa/core.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <set>

#include "sopa/error.hpp"

namespace sopa {

ActivityId::ActivityId(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw ValidationError("activity name must not be empty");
}

void CostDriverHierarchy::add(const AbstractCostDriver& abstract, ConcreteCostDriver concrete) {
  if (abstract.id.empty()) throw ValidationError("abstract driver id must not be empty");
  if (concrete.id.empty()) throw ValidationError("concrete driver id must not be empty");
  if (concrete.parent.empty()) concrete.parent = abstract.id;
  if (concrete.parent != abstract.id)
    throw ValidationError("concrete driver '" + concrete.id + "' has parent '" + concrete.parent +
                          "' but was registered under '" + abstract.id + "'");
  if (concrete_.count(concrete.id))
    throw ValidationError("concrete driver '" + concrete.id + "' already concretizes '" +
                          concrete_.at(concrete.id).parent + "'");
  by_abstract_[abstract.id].push_back(concrete.id);
  concrete_.emplace(concrete.id, std::move(concrete));
}

bool CostDriverHierarchy::has_abstract(const std::string& abstract_id) const {
  return by_abstract_.count(abstract_id) > 0;
}

const ConcreteCostDriver* CostDriverHierarchy::find_concrete(const std::string& concrete_id) const {
  auto it = concrete_.find(concrete_id);
  return it == concrete_.end() ? nullptr : &it->second;
}

std::vector<const ConcreteCostDriver*> CostDriverHierarchy::concretizations(const std::string& abstract_id) const {
  std::vector<const ConcreteCostDriver*> out;
  if (auto it = by_abstract_.find(abstract_id); it != by_abstract_.end())
    for (const auto& id : it->second) out.push_back(&concrete_.at(id));
  return out;
}

std::vector<std::pair<std::string, std::string>> CostDriverHierarchy::pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [abstract, ids] : by_abstract_)
    for (const auto& id : ids) out.emplace_back(abstract, id);
  return out;
}

Timestamp Timestamp::parse(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &s, &consumed) != 6 ||
      consumed != 19)
    throw ParseError("malformed timestamp '" + text + "'");
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t digits_start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == digits_start) throw ParseError("malformed timestamp '" + text + "'");
  }
  int offset = 0;
  const std::string zone = text.substr(pos);
  if (zone == "Z") {
    offset = 0;
  } else if (zone.size() == 6 && (zone[0] == '+' || zone[0] == '-') && zone[3] == ':' &&
             std::isdigit(static_cast<unsigned char>(zone[1])) && std::isdigit(static_cast<unsigned char>(zone[2])) &&
             std::isdigit(static_cast<unsigned char>(zone[4])) && std::isdigit(static_cast<unsigned char>(zone[5]))) {
    const int oh = (zone[1] - '0') * 10 + (zone[2] - '0');
    const int om = (zone[4] - '0') * 10 + (zone[5] - '0');
    if (oh > 23 || om > 59) throw ParseError("malformed timestamp offset '" + text + "'");
    offset = (oh * 60 + om) * (zone[0] == '-' ? -1 : 1);
  } else {
    throw ParseError("timestamp '" + text + "' lacks a UTC offset");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) throw ParseError("malformed timestamp '" + text + "'");
  const std::int64_t local = sys_days{ymd}.time_since_epoch().count() * 86400LL + h * 3600LL + mi * 60LL + s;
  return {local - offset * 60LL, offset};
}

std::string Timestamp::to_string() const {
  using namespace std::chrono;
  const std::int64_t local = epoch_seconds + offset_minutes * 60LL;
  std::int64_t days = local / 86400;
  std::int64_t rem = local % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  const int off = offset_minutes < 0 ? -offset_minutes : offset_minutes;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d%c%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60), offset_minutes < 0 ? '-' : '+',
                off / 60, off % 60);
  return buf;
}

bool ActivityInstance::add_driver(DriverRef driver) {
  if (has_driver(driver.id)) return false;
  drivers.push_back(std::move(driver));
  return true;
}

bool ActivityInstance::has_driver(const std::string& id) const {
  return std::any_of(drivers.begin(), drivers.end(), [&](const DriverRef& d) { return d.id == id; });
}

void EventLog::check_invariants() const {
  std::set<std::string> ids;
  for (const auto& t : traces) {
    if (!ids.insert(t.id).second) throw ValidationError("duplicate trace id '" + t.id + "'");
    if (t.instances.empty()) throw ValidationError("trace '" + t.id + "' has no activity instances");
    for (std::size_t i = 0; i < t.instances.size(); ++i) {
      const auto& ai = t.instances[i];
      if (ai.activity.empty()) throw ValidationError("trace '" + t.id + "' has an unnamed activity instance");
      if (ai.sequence != i) throw ValidationError("trace '" + t.id + "' has out-of-order sequence indices");
      std::set<std::string> seen;
      for (const auto& d : ai.drivers)
        if (!seen.insert(d.id).second)
          throw ValidationError("trace '" + t.id + "' activity '" + ai.activity + "' repeats driver '" + d.id + "'");
    }
  }
}

}  // namespace sopa
