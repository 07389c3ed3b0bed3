#include "castl/sat/solver.hpp"

#include <algorithm>
#include <cmath>

namespace castl::sat {

namespace {

double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

constexpr int kRestartBase = 100;
constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;

}  // namespace

Solver::Solver(std::uint64_t seed) : rng_(seed) {}

Var Solver::new_var() {
  const Var v = num_vars();
  assigns_.push_back(kUndef);
  polarity_.push_back(1);  // prefer false
  level_.push_back(0);
  reason_.push_back(-1);
  seen_.push_back(0);
  // Tiny seeded perturbation so different seeds explore different orders.
  activity_.push_back(std::uniform_real_distribution<double>(0.0, 1e-5)(rng_));
  heap_pos_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  model_.push_back(0);
  heap_insert(v);
  return v;
}

bool Solver::add_clause(std::vector<Lit> lits) {
  if (!ok_) return false;
  cancel_until(0);
  std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) { return a.code < b.code; });
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    const Lit l = lits[i];
    if (i + 1 < lits.size() && lits[i + 1] == ~l) return true;  // tautology
    if (!kept.empty() && kept.back() == l) continue;
    const auto v = value(l);
    if (v == 1) return true;
    if (v == 0) continue;
    kept.push_back(l);
  }
  if (kept.empty()) {
    ok_ = false;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept.front(), -1);
    if (propagate() >= 0) ok_ = false;
    return ok_;
  }
  clauses_.push_back({std::move(kept), false, 0, 0});
  attach(static_cast<int>(clauses_.size()) - 1);
  return true;
}

void Solver::attach(int ci) {
  const auto& c = clauses_[static_cast<std::size_t>(ci)];
  watches_[static_cast<std::size_t>(c.lits[0].code)].push_back(ci);
  watches_[static_cast<std::size_t>(c.lits[1].code)].push_back(ci);
}

void Solver::enqueue(Lit l, int reason) {
  const auto v = static_cast<std::size_t>(l.var());
  assigns_[v] = l.negated() ? 0 : 1;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

int Solver::propagate() {
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    const Lit f = ~p;
    ++stats_.propagations;
    auto& ws = watches_[static_cast<std::size_t>(f.code)];
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      const int ci = ws[i++];
      Clause& c = clauses_[static_cast<std::size_t>(ci)];
      if (c.lits[0] == f) std::swap(c.lits[0], c.lits[1]);
      if (value(c.lits[0]) == 1) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (value(c.lits[k]) != 0) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[static_cast<std::size_t>(c.lits[1].code)].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (value(c.lits[0]) == 0) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return ci;
      }
      enqueue(c.lits[0], ci);
    }
    ws.resize(j);
  }
  return -1;
}

bool Solver::redundant(Lit l) const {
  const int r = reason_[static_cast<std::size_t>(l.var())];
  if (r < 0) return false;
  const auto& c = clauses_[static_cast<std::size_t>(r)];
  for (std::size_t k = 1; k < c.lits.size(); ++k) {
    const auto v = static_cast<std::size_t>(c.lits[k].var());
    if (!seen_[v] && level_[v] > 0) return false;
  }
  return true;
}

void Solver::analyze(int confl, std::vector<Lit>& learnt, int& backtrack_level, int& lbd) {
  learnt.clear();
  learnt.push_back(Lit{});
  int path = 0;
  Lit p{};
  int idx = static_cast<int>(trail_.size()) - 1;
  do {
    Clause& c = clauses_[static_cast<std::size_t>(confl)];
    if (c.learnt) bump_clause(c);
    for (std::size_t k = (p.code < 0 ? 0 : 1); k < c.lits.size(); ++k) {
      const Lit q = c.lits[k];
      const auto v = static_cast<std::size_t>(q.var());
      if (seen_[v] || level_[v] == 0) continue;
      bump_var(q.var());
      seen_[v] = 1;
      if (level_[v] >= decision_level()) {
        ++path;
      } else {
        learnt.push_back(q);
      }
    }
    while (!seen_[static_cast<std::size_t>(trail_[static_cast<std::size_t>(idx)].var())]) --idx;
    p = trail_[static_cast<std::size_t>(idx)];
    --idx;
    confl = reason_[static_cast<std::size_t>(p.var())];
    seen_[static_cast<std::size_t>(p.var())] = 0;
    --path;
  } while (path > 0);
  learnt[0] = ~p;

  std::vector<Lit> all(learnt.begin() + 1, learnt.end());
  std::size_t j = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    if (!redundant(learnt[i])) learnt[j++] = learnt[i];
  }
  learnt.resize(j);
  for (const Lit l : all) seen_[static_cast<std::size_t>(l.var())] = 0;

  backtrack_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i) {
      if (level_[static_cast<std::size_t>(learnt[i].var())] > level_[static_cast<std::size_t>(learnt[max_i].var())]) {
        max_i = i;
      }
    }
    std::swap(learnt[1], learnt[max_i]);
    backtrack_level = level_[static_cast<std::size_t>(learnt[1].var())];
  }
  std::vector<int> levels;
  for (const Lit l : learnt) levels.push_back(level_[static_cast<std::size_t>(l.var())]);
  std::sort(levels.begin(), levels.end());
  lbd = static_cast<int>(std::unique(levels.begin(), levels.end()) - levels.begin());
}

void Solver::cancel_until(int level) {
  if (decision_level() <= level) return;
  const auto stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level)]);
  for (std::size_t i = trail_.size(); i-- > stop;) {
    const Var v = trail_[i].var();
    const auto vi = static_cast<std::size_t>(v);
    polarity_[vi] = trail_[i].negated() ? 1 : 0;
    assigns_[vi] = kUndef;
    reason_[vi] = -1;
    if (!heap_contains(v)) heap_insert(v);
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = trail_.size();
}

Lit Solver::pick_branch() {
  while (!heap_.empty()) {
    const Var v = heap_pop();
    if (assigns_[static_cast<std::size_t>(v)] == kUndef) return Lit::make(v, polarity_[static_cast<std::size_t>(v)] != 0);
  }
  return Lit{};
}

void Solver::bump_var(Var v) {
  const auto vi = static_cast<std::size_t>(v);
  activity_[vi] += var_inc_;
  if (activity_[vi] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_contains(v)) heap_up(heap_pos_[vi]);
}

void Solver::bump_clause(Clause& c) {
  c.activity += cla_inc_;
  if (c.activity > 1e20) {
    for (auto& cl : clauses_) {
      if (cl.learnt) cl.activity *= 1e-20;
    }
    cla_inc_ *= 1e-20;
  }
}

void Solver::reduce_db() {
  // Only called at level 0; reasons of level-0 literals are never inspected.
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    if (clauses_[i].learnt && clauses_[i].lbd > 2) candidates.push_back(i);
  }
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    if (clauses_[a].lbd != clauses_[b].lbd) return clauses_[a].lbd > clauses_[b].lbd;
    return clauses_[a].activity < clauses_[b].activity;
  });
  std::vector<char> drop(clauses_.size(), 0);
  for (std::size_t k = 0; k < candidates.size() / 2; ++k) drop[candidates[k]] = 1;
  std::vector<Clause> kept;
  kept.reserve(clauses_.size());
  learnt_count_ = 0;
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    if (drop[i]) continue;
    if (clauses_[i].learnt) ++learnt_count_;
    kept.push_back(std::move(clauses_[i]));
  }
  clauses_ = std::move(kept);
  for (auto& w : watches_) w.clear();
  for (std::size_t i = 0; i < clauses_.size(); ++i) attach(static_cast<int>(i));
  for (const Lit l : trail_) reason_[static_cast<std::size_t>(l.var())] = -1;
  max_learnts_ = max_learnts_ + max_learnts_ / 10;
}

Result Solver::solve(const std::vector<Lit>& assumptions, const util::Deadline& deadline) {
  if (!ok_) return Result::Unsat;
  cancel_until(0);
  if (propagate() >= 0) {
    ok_ = false;
    return Result::Unsat;
  }
  std::vector<Lit> learnt;
  int restart_no = 0;
  std::uint64_t budget = static_cast<std::uint64_t>(luby(2, restart_no) * kRestartBase);
  std::uint64_t since_restart = 0;

  for (;;) {
    const int confl = propagate();
    if (confl >= 0) {
      ++stats_.conflicts;
      ++since_restart;
      if (decision_level() == 0) {
        ok_ = false;
        return Result::Unsat;
      }
      int bt = 0;
      int lbd = 0;
      analyze(confl, learnt, bt, lbd);
      cancel_until(bt);
      if (learnt.size() == 1) {
        enqueue(learnt.front(), -1);
      } else {
        clauses_.push_back({learnt, true, lbd, 0});
        const int ci = static_cast<int>(clauses_.size()) - 1;
        attach(ci);
        bump_clause(clauses_.back());
        ++learnt_count_;
        enqueue(learnt.front(), ci);
      }
      var_inc_ /= kVarDecay;
      cla_inc_ /= kClauseDecay;
      if ((stats_.conflicts & 63) == 0 && deadline.expired()) {
        cancel_until(0);
        return Result::Unknown;
      }
      continue;
    }

    if (since_restart >= budget) {
      ++stats_.restarts;
      since_restart = 0;
      budget = static_cast<std::uint64_t>(luby(2, ++restart_no) * kRestartBase);
      cancel_until(0);
      if (learnt_count_ > max_learnts_) reduce_db();
      if (deadline.expired()) return Result::Unknown;
      continue;
    }

    Lit next{};
    while (static_cast<std::size_t>(decision_level()) < assumptions.size()) {
      const Lit a = assumptions[static_cast<std::size_t>(decision_level())];
      const auto v = value(a);
      if (v == 1) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));
      } else if (v == 0) {
        cancel_until(0);
        return Result::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (next.code < 0) {
      ++stats_.decisions;
      if ((stats_.decisions & 1023) == 0 && deadline.expired()) {
        cancel_until(0);
        return Result::Unknown;
      }
      next = pick_branch();
      if (next.code < 0) {
        for (std::size_t v = 0; v < assigns_.size(); ++v) model_[v] = assigns_[v];
        cancel_until(0);
        return Result::Sat;
      }
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(next, -1);
  }
}

void Solver::heap_insert(Var v) {
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(static_cast<int>(heap_.size()) - 1);
}

void Solver::heap_up(int pos) {
  const Var v = heap_[static_cast<std::size_t>(pos)];
  const double a = activity_[static_cast<std::size_t>(v)];
  while (pos > 0) {
    const int parent = (pos - 1) / 2;
    const Var pv = heap_[static_cast<std::size_t>(parent)];
    if (activity_[static_cast<std::size_t>(pv)] >= a) break;
    heap_[static_cast<std::size_t>(pos)] = pv;
    heap_pos_[static_cast<std::size_t>(pv)] = pos;
    pos = parent;
  }
  heap_[static_cast<std::size_t>(pos)] = v;
  heap_pos_[static_cast<std::size_t>(v)] = pos;
}

void Solver::heap_down(int pos) {
  const int n = static_cast<int>(heap_.size());
  const Var v = heap_[static_cast<std::size_t>(pos)];
  const double a = activity_[static_cast<std::size_t>(v)];
  for (;;) {
    int child = 2 * pos + 1;
    if (child >= n) break;
    if (child + 1 < n && activity_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(child + 1)])] >
                             activity_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(child)])]) {
      ++child;
    }
    const Var cv = heap_[static_cast<std::size_t>(child)];
    if (activity_[static_cast<std::size_t>(cv)] <= a) break;
    heap_[static_cast<std::size_t>(pos)] = cv;
    heap_pos_[static_cast<std::size_t>(cv)] = pos;
    pos = child;
  }
  heap_[static_cast<std::size_t>(pos)] = v;
  heap_pos_[static_cast<std::size_t>(v)] = pos;
}

Var Solver::heap_pop() {
  const Var top = heap_.front();
  heap_pos_[static_cast<std::size_t>(top)] = -1;
  const Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[static_cast<std::size_t>(last)] = 0;
    heap_down(0);
  }
  return top;
}

}  // namespace castl::sat
