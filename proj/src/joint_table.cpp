#include "causalbias/joint_table.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "causalbias/errors.hpp"

namespace causalbias {

namespace {

constexpr std::size_t kMaxVariables = 20;

double kahan_sum(const std::vector<double>& xs) {
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

std::string describe(const Assignment& a) {
  std::ostringstream out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out << ",";
    out << a[i].first << "=" << a[i].second;
  }
  return out.str();
}

}  // namespace

JointTable::JointTable(std::vector<std::string> variables, std::vector<double> probs)
    : variables_(std::move(variables)), probs_(std::move(probs)) {
  if (variables_.empty()) throw std::invalid_argument("joint table needs at least one variable");
  if (variables_.size() > kMaxVariables)
    throw std::invalid_argument("joint table limited to 20 variables");
  for (std::size_t i = 0; i < variables_.size(); ++i)
    for (std::size_t j = i + 1; j < variables_.size(); ++j)
      if (variables_[i] == variables_[j])
        throw std::invalid_argument("duplicate variable: " + variables_[i]);
  if (probs_.size() != (std::size_t{1} << variables_.size()))
    throw std::invalid_argument("probability array must have 2^k entries");
  for (double p : probs_)
    if (!(p >= 0.0)) throw std::invalid_argument("negative or non-finite probability entry");
  double total = kahan_sum(probs_);
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("probabilities sum to " + std::to_string(total) + ", not 1");
}

JointTable JointTable::from_samples(const std::vector<std::vector<int>>& rows,
                                    std::vector<std::string> variables, double pseudocount) {
  if (rows.empty()) throw std::invalid_argument("no rows");
  if (pseudocount < 0.0) throw std::invalid_argument("negative pseudocount");
  const std::size_t k = variables.size();
  std::vector<double> counts(std::size_t{1} << k, pseudocount);
  for (const auto& row : rows) {
    if (row.size() != k) throw std::invalid_argument("row width does not match variable list");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (row[i] != 0 && row[i] != 1) throw std::invalid_argument("non-binary cell value");
      idx = (idx << 1) | static_cast<std::size_t>(row[i]);
    }
    counts[idx] += 1.0;
  }
  double total = static_cast<double>(rows.size()) + pseudocount * static_cast<double>(counts.size());
  for (double& c : counts) c /= total;
  JointTable table(std::move(variables), std::move(counts));
  table.sample_count_ = rows.size();
  return table;
}

std::size_t JointTable::index_of(const std::string& variable) const {
  auto it = std::find(variables_.begin(), variables_.end(), variable);
  if (it == variables_.end()) throw std::invalid_argument("unknown variable: " + variable);
  return static_cast<std::size_t>(it - variables_.begin());
}

bool JointTable::has(const std::string& variable) const {
  return std::find(variables_.begin(), variables_.end(), variable) != variables_.end();
}

namespace {

// (mask, bits) pair for a partial assignment; bit position of variable i is k-1-i.
struct MaskBits {
  std::size_t mask = 0, bits = 0;
};

MaskBits compile(const JointTable& t, const Assignment& a) {
  MaskBits mb;
  const std::size_t k = t.variable_count();
  for (const auto& [name, value] : a) {
    if (value != 0 && value != 1)
      throw std::invalid_argument("assignment value must be 0 or 1 for " + name);
    std::size_t bit = std::size_t{1} << (k - 1 - t.index_of(name));
    if (mb.mask & bit) throw std::invalid_argument("variable assigned twice: " + name);
    mb.mask |= bit;
    if (value) mb.bits |= bit;
  }
  return mb;
}

double masked_sum(const JointTable& t, MaskBits mb) {
  double sum = 0.0;
  for (std::size_t idx = 0; idx < t.cell_count(); ++idx)
    if ((idx & mb.mask) == mb.bits) sum += t.cell(idx);
  return sum;
}

}  // namespace

double JointTable::marginal(const Assignment& partial) const {
  return masked_sum(*this, compile(*this, partial));
}

double JointTable::cond_prob(const Assignment& event, const Assignment& given) const {
  MaskBits ev = compile(*this, event);
  MaskBits gv = compile(*this, given);
  if (ev.mask & gv.mask) throw std::invalid_argument("event and given overlap");
  double pg = masked_sum(*this, gv);
  if (pg <= 0.0)
    throw PositivityError("conditioning on null event: P(" + describe(given) + ") = 0");
  MaskBits both{ev.mask | gv.mask, ev.bits | gv.bits};
  return masked_sum(*this, both) / pg;
}

JointTable JointTable::marginal_table(const std::vector<std::string>& keep) const {
  const std::size_t k = variables_.size();
  std::vector<std::size_t> src_bit;
  for (const auto& name : keep) src_bit.push_back(k - 1 - index_of(name));
  std::vector<double> out(std::size_t{1} << keep.size(), 0.0);
  for (std::size_t idx = 0; idx < probs_.size(); ++idx) {
    std::size_t dst = 0;
    for (std::size_t i = 0; i < keep.size(); ++i)
      dst = (dst << 1) | ((idx >> src_bit[i]) & 1u);
    out[dst] += probs_[idx];
  }
  JointTable table(keep, std::move(out));
  table.sample_count_ = sample_count_;
  return table;
}

double stat_disp(const JointTable& table, const std::string& y, const std::string& a) {
  double pa1 = table.marginal({{a, 1}});
  double pa0 = table.marginal({{a, 0}});
  if (pa0 <= 0.0 || pa1 <= 0.0)
    throw PositivityError("degenerate sensitive variable " + a);
  return table.cond_prob({{y, 1}}, {{a, 1}}) - table.cond_prob({{y, 1}}, {{a, 0}});
}

double stat_disp_adjusted(const JointTable& table, const std::string& y, const std::string& a,
                          const std::vector<std::string>& adj) {
  if (adj.empty()) return stat_disp(table, y, a);
  const std::size_t strata = std::size_t{1} << adj.size();
  double total = 0.0;
  for (std::size_t s = 0; s < strata; ++s) {
    Assignment stratum;
    for (std::size_t i = 0; i < adj.size(); ++i)
      stratum.push_back({adj[i], static_cast<int>((s >> (adj.size() - 1 - i)) & 1u)});
    double ps = table.marginal(stratum);
    if (ps <= 0.0) continue;
    Assignment a1 = stratum, a0 = stratum;
    a1.push_back({a, 1});
    a0.push_back({a, 0});
    if (table.marginal(a1) <= 0.0 || table.marginal(a0) <= 0.0) {
      std::ostringstream msg;
      msg << "positivity violation: stratum ";
      for (std::size_t i = 0; i < stratum.size(); ++i) {
        if (i) msg << ",";
        msg << stratum[i].first << "=" << stratum[i].second;
      }
      msg << " lacks both values of " << a;
      throw PositivityError(msg.str());
    }
    total += (table.cond_prob({{y, 1}}, a1) - table.cond_prob({{y, 1}}, a0)) * ps;
  }
  return total;
}

namespace {

double y1_given(const JointTable& t, const std::string& y, const Assignment& given) {
  return t.cond_prob({{y, 1}}, given);
}

void require_stratum(const JointTable& t, const Assignment& given) {
  if (t.marginal(given) <= 0.0)
    throw PositivityError("positivity violation: empty stratum " + describe(given));
}

}  // namespace

double interaction_term(const JointTable& table, const std::string& y, const std::string& a,
                        const std::string& b) {
  for (int av : {0, 1})
    for (int bv : {0, 1}) require_stratum(table, {{a, av}, {b, bv}});
  return y1_given(table, y, {{a, 1}, {b, 1}}) - y1_given(table, y, {{a, 0}, {b, 1}}) -
         y1_given(table, y, {{a, 1}, {b, 0}}) + y1_given(table, y, {{a, 0}, {b, 0}});
}

double interaction_adjusted(const JointTable& table, const std::string& y, const std::string& a,
                            const std::string& b, const std::string& z) {
  double total = 0.0;
  for (int zv : {0, 1}) {
    double pz = table.marginal({{z, zv}});
    if (pz <= 0.0) continue;
    for (int av : {0, 1})
      for (int bv : {0, 1}) require_stratum(table, {{a, av}, {b, bv}, {z, zv}});
    double term = y1_given(table, y, {{a, 1}, {b, 1}, {z, zv}}) -
                  y1_given(table, y, {{a, 0}, {b, 1}, {z, zv}}) -
                  y1_given(table, y, {{a, 1}, {b, 0}, {z, zv}}) +
                  y1_given(table, y, {{a, 0}, {b, 0}, {z, zv}});
    total += term * pz;
  }
  return total;
}

double sd_no_interaction(const JointTable& table, const std::string& y, const std::string& a,
                         const std::string& b) {
  require_stratum(table, {{a, 1}, {b, 0}});
  require_stratum(table, {{a, 0}, {b, 0}});
  return y1_given(table, y, {{a, 1}, {b, 0}}) - y1_given(table, y, {{a, 0}, {b, 0}});
}

double sd_no_interaction_adjusted(const JointTable& table, const std::string& y,
                                  const std::string& a, const std::string& b,
                                  const std::string& z) {
  double total = 0.0;
  for (int zv : {0, 1}) {
    double pz = table.marginal({{z, zv}});
    if (pz <= 0.0) continue;
    require_stratum(table, {{a, 1}, {b, 0}, {z, zv}});
    require_stratum(table, {{a, 0}, {b, 0}, {z, zv}});
    total += (y1_given(table, y, {{a, 1}, {b, 0}, {z, zv}}) -
              y1_given(table, y, {{a, 0}, {b, 0}, {z, zv}})) *
             pz;
  }
  return total;
}

}  // namespace causalbias
