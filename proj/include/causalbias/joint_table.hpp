#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace causalbias {

/// Partial assignment of binary variables, e.g. {{"A",1},{"Z",0}}.
using Assignment = std::vector<std::pair<std::string, int>>;

/// Exact joint probability table over k binary variables (k <= 20), dense,
/// indexed lexicographically by assignment: the first variable is the most
/// significant bit. Immutable after construction.
class JointTable {
 public:
  /// Parametric table; validates entries >= 0 and sum within 1e-12 of 1.
  JointTable(std::vector<std::string> variables, std::vector<double> probs);

  /// Maximum-likelihood cell frequencies from {0,1} rows. `pseudocount` is an
  /// opt-in Laplace smoothing constant; the default applies none.
  static JointTable from_samples(const std::vector<std::vector<int>>& rows,
                                 std::vector<std::string> variables,
                                 double pseudocount = 0.0);

  const std::vector<std::string>& variables() const { return variables_; }
  std::size_t variable_count() const { return variables_.size(); }
  std::size_t cell_count() const { return probs_.size(); }
  double cell(std::size_t index) const { return probs_[index]; }
  const std::vector<double>& cells() const { return probs_; }

  /// Sample count when estimated via from_samples; empty for parametric tables.
  std::optional<std::size_t> sample_count() const { return sample_count_; }

  std::size_t index_of(const std::string& variable) const;
  bool has(const std::string& variable) const;

  /// P(assignment) summed over unmentioned variables.
  double marginal(const Assignment& partial) const;

  /// P(event | given); throws PositivityError when P(given) = 0.
  double cond_prob(const Assignment& event, const Assignment& given) const;

  /// Table over a subset of variables, marginalizing out the rest.
  JointTable marginal_table(const std::vector<std::string>& keep) const;

 private:
  std::vector<std::string> variables_;
  std::vector<double> probs_;
  std::optional<std::size_t> sample_count_;

  friend struct JointTableAccess;
};

/// StatDisp(Y,A) = P(y1|a1) - P(y1|a0).
double stat_disp(const JointTable& table, const std::string& y, const std::string& a);

/// Backdoor-adjusted disparity: sum_s (P(y1|a1,s) - P(y1|a0,s)) P(s) over
/// assignments of `adj`. Equals stat_disp when adj is empty. Strata with
/// P(s) = 0 are skipped; P(s) > 0 with an empty (a,s) stratum raises
/// PositivityError naming the stratum.
double stat_disp_adjusted(const JointTable& table, const std::string& y, const std::string& a,
                          const std::vector<std::string>& adj);

/// Additive-scale interaction: P(y1|a1,b1) - P(y1|a0,b1) - P(y1|a1,b0) + P(y1|a0,b0).
double interaction_term(const JointTable& table, const std::string& y, const std::string& a,
                        const std::string& b);

/// z-stratified interaction: sum_z Interaction(A,B | z) P(z).
double interaction_adjusted(const JointTable& table, const std::string& y, const std::string& a,
                            const std::string& b, const std::string& z);

/// Interaction-free effect of `a`: P(y1|a1,b0) - P(y1|a0,b0). Swap arguments
/// for the B variant.
double sd_no_interaction(const JointTable& table, const std::string& y, const std::string& a,
                         const std::string& b);

/// z-stratified interaction-free effect: sum_z (P(y1|a1,b0,z) - P(y1|a0,b0,z)) P(z).
double sd_no_interaction_adjusted(const JointTable& table, const std::string& y,
                                  const std::string& a, const std::string& b,
                                  const std::string& z);

}  // namespace causalbias
