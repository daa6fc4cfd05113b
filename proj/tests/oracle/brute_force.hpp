#pragma once

// Exhaustive alignment search over the plain instance description. Shares no
// code with the library: slot updates, guard charging and prices are redone here.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "support/random_instances.hpp"

namespace oracle {

using testsupport::RActivity;
using testsupport::RGuard;
using testsupport::RModel;
using testsupport::RTrace;

struct Slot {
  int tag = 0;  // 0 unset, 1 corrected, 2 observed
  double v = 0.0;
};
using Slots = std::map<std::string, Slot>;

struct Result {
  double best_g = std::numeric_limits<double>::infinity();
  double best_k = 0.0;
  std::size_t optima = 0;
  double worst_g = 0.0;
};

inline bool cmp(double v, const std::string& op, double c) {
  if (op == "<") return v < c;
  if (op == "<=") return v <= c;
  if (op == "=") return v == c;
  if (op == "!=") return v != c;
  if (op == ">=") return v >= c;
  return v > c;
}

inline std::string flip(const std::string& op) {
  if (op == "<") return ">=";
  if (op == "<=") return ">";
  if (op == "=") return "!=";
  if (op == "!=") return "=";
  if (op == ">=") return "<";
  return "<=";
}

// variable -> worst severity; empty map = satisfied.
using Charge = std::map<std::string, double>;

inline double price(const Charge& c, bool fuzzy) {
  double t = 0.0;
  for (const auto& [k, s] : c) t += fuzzy ? s : 1.0;
  return t;
}

inline void add(Charge& into, const std::string& var, double s) {
  auto [it, fresh] = into.emplace(var, s);
  if (!fresh) it->second = std::max(it->second, s);
}

struct Judge {
  const RModel& model;
  const RActivity& act;
  const testsupport::REvent& ev;
  const Slots& slots;
  bool fuzzy;

  const RGuard* mf_atom(const std::string& text) const {
    std::vector<const RGuard*> atoms;
    act.guard->collect_atoms(atoms);
    for (const RGuard* a : atoms)
      if (a->ramp && a->atom_text() == text) return a;
    return nullptr;
  }

  // Violations as a list of (var, severity) so OR can compare sides by price.
  std::vector<std::pair<std::string, double>> charge(const RGuard& g, bool neg) const {
    using K = RGuard::Kind;
    if (g.kind == K::Not) return charge(g.kids[0], !neg);
    if (g.kind == K::Atom) {
      double v;
      if (g.primed) {
        auto it = ev.writes.find(g.var);
        if (it == ev.writes.end()) return {};
        v = it->second;
      } else {
        auto it = slots.find(g.var);
        if (it == slots.end() || it->second.tag != 2) return {};
        v = it->second.v;
      }
      std::string op = neg ? flip(g.op) : g.op;
      if (cmp(v, op, g.c)) return {};
      RGuard leaf = g;
      leaf.op = op;
      double sev = 1.0;
      if (const RGuard* m = mf_atom(leaf.atom_text())) {
        double ideal = m->ramp->first, tol = m->ramp->second;
        sev = std::clamp((v - ideal) / (tol - ideal), 0.0, 1.0);
      }
      return {{g.var, sev}};
    }
    bool is_and = (g.kind == K::And) != neg;
    auto l = charge(g.kids[0], neg);
    auto r = charge(g.kids[1], neg);
    if (is_and) {
      l.insert(l.end(), r.begin(), r.end());
      return l;
    }
    if (l.empty() || r.empty()) return {};
    return price(to_charge(r), fuzzy) < price(to_charge(l), fuzzy) ? r : l;
  }

  static Charge to_charge(const std::vector<std::pair<std::string, double>>& v) {
    Charge c;
    for (const auto& [k, s] : v) add(c, k, s);
    return c;
  }

  double sync_cost() const {
    Charge c;
    for (const auto& w : act.writes)
      if (!ev.writes.count(w)) add(c, w, 1.0);
    if (act.guard)
      for (const auto& [k, s] : charge(*act.guard, false)) add(c, k, s);
    return price(c, fuzzy);
  }
};

class BruteForce {
 public:
  BruteForce(const RModel& m, const RTrace& t, bool fuzzy, double eps) : m_(m), t_(t), fuzzy_(fuzzy), eps_(eps) {}

  Result run() {
    Slots slots;
    dfs(0, 0, slots, 0.0, 0.0);
    Result r;
    r.best_g = best_;
    for (const auto& [g, k] : complete_)
      if (g <= best_ + 1e-9) {
        ++r.optima;
        r.best_k = k;
      }
    r.worst_g = static_cast<double>(t_.size()) * (1.0 + eps_) + cheapest_run(0);
    return r;
  }

 private:
  double model_move(const RActivity& a) const { return a.invisible ? 0.0 : 1.0 + static_cast<double>(a.writes.size()); }

  double cheapest_run(int s) const {
    if (s == m_.final_state) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& tr : m_.transitions)
      if (tr.from == s) best = std::min(best, model_move(m_.activity(tr.activity)) + eps_ + cheapest_run(tr.to));
    return best;
  }

  void dfs(std::size_t i, int s, const Slots& slots, double g, double k) {
    if (g > best_ + 1e-9) return;
    if (i == t_.size() && s == m_.final_state) {
      complete_.emplace_back(g, k);
      best_ = std::min(best_, g);
    }
    if (i < t_.size()) dfs(i + 1, s, slots, g + 1.0 + eps_, k + 1.0);
    for (const auto& tr : m_.transitions) {
      if (tr.from != s) continue;
      const RActivity& a = m_.activity(tr.activity);
      Slots after = slots;
      for (const auto& w : a.writes) after[w] = Slot{1, 0.0};
      double c = model_move(a);
      dfs(i, tr.to, after, g + c + eps_, k + c);
      if (i < t_.size() && !a.invisible && t_[i].activity == a.name) {
        Judge judge{m_, a, t_[i], slots, fuzzy_};
        double sc = judge.sync_cost();
        Slots synced = slots;
        for (const auto& w : a.writes) {
          auto it = t_[i].writes.find(w);
          synced[w] = it == t_[i].writes.end() ? Slot{1, 0.0} : Slot{2, it->second};
        }
        dfs(i + 1, tr.to, synced, g + sc + eps_, k + sc);
      }
    }
  }

  const RModel& m_;
  const RTrace& t_;
  bool fuzzy_;
  double eps_;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> complete_;
};

inline Result brute_force(const RModel& m, const RTrace& t, bool fuzzy, double eps) {
  return BruteForce(m, t, fuzzy, eps).run();
}

}  // namespace oracle
