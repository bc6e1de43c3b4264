#include "causalbias/scm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "causalbias/errors.hpp"
#include "causalbias/linear.hpp"
#include "causalbias/rng.hpp"

namespace causalbias {

namespace {

void require_prob(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

}  // namespace

BinaryMeasurementSpec BinaryMeasurementSpec::randomize(std::uint64_t seed) {
  Rng rng(seed);
  BinaryMeasurementSpec spec;
  spec.p_z1 = rng.uniform(0.01, 0.99);
  spec.p_a1_given_z1 = rng.uniform(0.01, 0.99);
  spec.p_a1_given_z0 = rng.uniform(0.01, 0.99);
  spec.p_t1_given_z1 = rng.uniform(0.01, 0.99);
  spec.p_t1_given_z0 = rng.uniform(0.01, 0.99);
  return spec;  // Y keeps the (z + a) / 2 mechanism
}

BinaryInteractionSpec BinaryInteractionSpec::randomize(std::uint64_t seed) {
  Rng rng(seed);
  BinaryInteractionSpec spec{};
  spec.p_a1 = rng.uniform(0.05, 0.95);
  spec.p_b1 = rng.uniform(0.05, 0.95);
  for (int a : {0, 1})
    for (int b : {0, 1}) spec.y1_given[a][b] = rng.uniform01();
  return spec;
}

std::string structure_name(const ScmStructure& s) {
  struct Visitor {
    std::string operator()(const LinearConfoundingSpec&) const { return "linear_confounding"; }
    std::string operator()(const LinearCollidingSpec&) const { return "linear_colliding"; }
    std::string operator()(const LinearMeasurementSpec&) const { return "linear_measurement"; }
    std::string operator()(const LinearInteractionSpec&) const { return "linear_interaction"; }
    std::string operator()(const BinaryConfoundingSpec&) const { return "binary_confounding"; }
    std::string operator()(const BinaryMeasurementSpec&) const { return "binary_measurement"; }
    std::string operator()(const BinaryInteractionSpec&) const { return "binary_interaction"; }
  };
  return std::visit(Visitor{}, s);
}

bool structure_is_binary(const ScmStructure& s) {
  return std::holds_alternative<BinaryConfoundingSpec>(s) ||
         std::holds_alternative<BinaryMeasurementSpec>(s) ||
         std::holds_alternative<BinaryInteractionSpec>(s);
}

namespace {

struct SimulateVisitor {
  std::size_t n;
  Rng& rng;

  Dataset operator()(const LinearConfoundingSpec& s) const {
    std::vector<double> z(n), a(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = rng.normal();
      a[i] = s.beta * z[i] + rng.normal();
      y[i] = s.alpha * a[i] + s.gamma * z[i] + rng.normal();
    }
    Dataset d;
    d.add_column("Z", std::move(z));
    d.add_column("A", std::move(a));
    d.add_column("Y", std::move(y));
    return d;
  }

  Dataset operator()(const LinearCollidingSpec& s) const {
    std::vector<double> a(n), y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.normal();
      y[i] = s.alpha * a[i] + rng.normal();
      w[i] = s.eta * a[i] + s.epsilon * y[i] + rng.normal();
    }
    Dataset d;
    d.add_column("A", std::move(a));
    d.add_column("Y", std::move(y));
    d.add_column("W", std::move(w));
    return d;
  }

  Dataset operator()(const LinearMeasurementSpec& s) const {
    std::vector<double> z(n), a(n), y(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = rng.normal();
      a[i] = s.beta * z[i] + rng.normal();
      y[i] = s.alpha * a[i] + s.gamma * z[i] + rng.normal();
      t[i] = s.lambda_zt * z[i] + rng.normal();
    }
    Dataset d;
    d.add_column("Z", std::move(z));
    d.add_column("A", std::move(a));
    d.add_column("Y", std::move(y));
    d.add_column("T", std::move(t));
    return d;
  }

  Dataset operator()(const LinearInteractionSpec& s) const {
    require_prob(s.p_a1, "p_a1");
    require_prob(s.p_b1, "p_b1");
    std::vector<double> a(n), b(n), c(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.bernoulli(s.p_a1);
      b[i] = rng.bernoulli(s.p_b1);
      c[i] = rng.normal();
      y[i] = s.beta0 + s.beta1 * a[i] + s.beta2 * b[i] + s.beta3 * a[i] * b[i] +
             s.beta4 * c[i] + rng.normal();
    }
    Dataset d;
    d.add_column("A", std::move(a));
    d.add_column("B", std::move(b));
    d.add_column("C", std::move(c));
    d.add_column("Y", std::move(y));
    return d;
  }

  Dataset operator()(const BinaryConfoundingSpec& s) const {
    // Observational factorization P(a) P(z|a) P(y|a,z); the joint matches the
    // causal Z -> A direction exactly.
    const ConfoundParams& p = s.params;
    std::vector<double> a(n), z(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      int av = rng.bernoulli(p.lambda);
      int zv = rng.bernoulli(av ? p.z1_given_a1() : p.z1_given_a0());
      double py = av ? (zv ? p.delta : p.gamma) : (zv ? p.beta : p.alpha);
      int yv = rng.bernoulli(py);
      a[i] = av;
      z[i] = zv;
      y[i] = yv;
    }
    Dataset d;
    d.add_column("A", std::move(a));
    d.add_column("Z", std::move(z));
    d.add_column("Y", std::move(y));
    return d;
  }

  Dataset operator()(const BinaryMeasurementSpec& s) const {
    for (double v : {s.p_z1, s.p_a1_given_z0, s.p_a1_given_z1, s.p_t1_given_z0, s.p_t1_given_z1})
      require_prob(v, "probability parameter");
    for (int a : {0, 1})
      for (int z : {0, 1}) require_prob(s.y1_given[a][z], "y1_given");
    std::vector<double> z(n), a(n), t(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      int zv = rng.bernoulli(s.p_z1);
      int av = rng.bernoulli(zv ? s.p_a1_given_z1 : s.p_a1_given_z0);
      int tv = rng.bernoulli(zv ? s.p_t1_given_z1 : s.p_t1_given_z0);
      int yv = rng.bernoulli(s.y1_given[av][zv]);
      z[i] = zv;
      a[i] = av;
      t[i] = tv;
      y[i] = yv;
    }
    Dataset d;
    d.add_column("Z", std::move(z));
    d.add_column("A", std::move(a));
    d.add_column("T", std::move(t));
    d.add_column("Y", std::move(y));
    return d;
  }

  Dataset operator()(const BinaryInteractionSpec& s) const {
    require_prob(s.p_a1, "p_a1");
    require_prob(s.p_b1, "p_b1");
    std::vector<double> a(n), b(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      int av = rng.bernoulli(s.p_a1);
      int bv = rng.bernoulli(s.p_b1);
      int yv = rng.bernoulli(s.y1_given[av][bv]);
      a[i] = av;
      b[i] = bv;
      y[i] = yv;
    }
    Dataset d;
    d.add_column("A", std::move(a));
    d.add_column("B", std::move(b));
    d.add_column("Y", std::move(y));
    return d;
  }
};

}  // namespace

Dataset simulate(const ScmSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("sample count must be at least 1");
  Rng rng(spec.seed);
  return std::visit(SimulateVisitor{spec.n, rng}, spec.structure);
}

namespace {

JointTable enumerate_confounding(const ConfoundParams& p) {
  std::vector<double> probs(8, 0.0);
  for (int a : {0, 1}) {
    double pa = a ? p.lambda : 1.0 - p.lambda;
    double pz1 = a ? p.z1_given_a1() : p.z1_given_a0();
    for (int z : {0, 1}) {
      double pz = z ? pz1 : 1.0 - pz1;
      double py1 = a ? (z ? p.delta : p.gamma) : (z ? p.beta : p.alpha);
      for (int y : {0, 1}) {
        double py = y ? py1 : 1.0 - py1;
        probs[static_cast<std::size_t>((a << 2) | (z << 1) | y)] = pa * pz * py;
      }
    }
  }
  return JointTable({"A", "Z", "Y"}, std::move(probs));
}

JointTable enumerate_measurement(const BinaryMeasurementSpec& s) {
  for (double v : {s.p_z1, s.p_a1_given_z0, s.p_a1_given_z1, s.p_t1_given_z0, s.p_t1_given_z1})
    require_prob(v, "probability parameter");
  std::vector<double> probs(16, 0.0);
  for (int z : {0, 1}) {
    double pz = z ? s.p_z1 : 1.0 - s.p_z1;
    double pa1 = z ? s.p_a1_given_z1 : s.p_a1_given_z0;
    double pt1 = z ? s.p_t1_given_z1 : s.p_t1_given_z0;
    for (int a : {0, 1}) {
      double pa = a ? pa1 : 1.0 - pa1;
      for (int t : {0, 1}) {
        double pt = t ? pt1 : 1.0 - pt1;
        double py1 = s.y1_given[a][z];
        require_prob(py1, "y1_given");
        for (int y : {0, 1}) {
          double py = y ? py1 : 1.0 - py1;
          probs[static_cast<std::size_t>((z << 3) | (a << 2) | (t << 1) | y)] = pz * pa * pt * py;
        }
      }
    }
  }
  return JointTable({"Z", "A", "T", "Y"}, std::move(probs));
}

JointTable enumerate_interaction(const BinaryInteractionSpec& s) {
  require_prob(s.p_a1, "p_a1");
  require_prob(s.p_b1, "p_b1");
  std::vector<double> probs(8, 0.0);
  for (int a : {0, 1}) {
    double pa = a ? s.p_a1 : 1.0 - s.p_a1;
    for (int b : {0, 1}) {
      double pb = b ? s.p_b1 : 1.0 - s.p_b1;
      double py1 = s.y1_given[a][b];
      require_prob(py1, "y1_given");
      for (int y : {0, 1}) {
        double py = y ? py1 : 1.0 - py1;
        probs[static_cast<std::size_t>((a << 2) | (b << 1) | y)] = pa * pb * py;
      }
    }
  }
  return JointTable({"A", "B", "Y"}, std::move(probs));
}

}  // namespace

JointTable enumerate_joint(const ScmStructure& structure) {
  if (const auto* c = std::get_if<BinaryConfoundingSpec>(&structure))
    return enumerate_confounding(c->params);
  if (const auto* m = std::get_if<BinaryMeasurementSpec>(&structure))
    return enumerate_measurement(*m);
  if (const auto* i = std::get_if<BinaryInteractionSpec>(&structure))
    return enumerate_interaction(*i);
  throw StructureError("enumerate_joint needs a binary structure, got " +
                       structure_name(structure));
}

BinaryMeasurementSpec random_identifiable_measurement(Rng& rng) {
  for (;;) {
    BinaryMeasurementSpec s;
    s.p_z1 = rng.uniform(0.05, 0.95);
    s.p_a1_given_z1 = rng.uniform(0.05, 0.95);
    s.p_a1_given_z0 = (0.5 - s.p_z1 * s.p_a1_given_z1) / (1.0 - s.p_z1);
    if (s.p_a1_given_z0 < 0.02 || s.p_a1_given_z0 > 0.98) continue;
    s.p_t1_given_z1 = rng.uniform(0.05, 0.95);
    s.p_t1_given_z0 = rng.uniform(0.05, 0.95);
    if (std::abs(s.error_mechanism().determinant()) < 0.05) continue;
    for (int a : {0, 1})
      for (int z : {0, 1}) s.y1_given[a][z] = rng.uniform(0.05, 0.95);
    JointTable t = enumerate_joint(s);
    bool ok = true;
    for (int a : {0, 1})
      for (int tv : {0, 1})
        if (t.marginal({{"A", a}, {"T", tv}}) < 0.01) ok = false;
    if (ok) return s;
  }
}

BiasKind bias_kind_from_string(const std::string& s) {
  if (s == "conf") return BiasKind::Confounding;
  if (s == "sel") return BiasKind::Selection;
  if (s == "meas") return BiasKind::Measurement;
  throw std::invalid_argument("unknown bias kind: " + s + " (expected conf|sel|meas)");
}

std::string to_string(BiasKind kind) {
  switch (kind) {
    case BiasKind::Confounding: return "conf";
    case BiasKind::Selection: return "sel";
    case BiasKind::Measurement: return "meas";
  }
  return "?";
}

std::vector<std::string> sweep_parameters(BiasKind kind) {
  switch (kind) {
    case BiasKind::Confounding: return {"beta", "gamma"};
    case BiasKind::Selection: return {"alpha", "eta", "epsilon"};
    case BiasKind::Measurement: return {"beta", "gamma", "lambda"};
  }
  return {};
}

std::size_t SweepAxis::point_count() const {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("bad axis range for " + name);
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

double SweepAxis::point(std::size_t i) const {
  // Keep exact zeros on grids whose origin is a multiple of the step.
  double m = lo / step;
  double mr = std::round(m);
  if (std::abs(m - mr) < 1e-9) return (mr + static_cast<double>(i)) * step;
  return lo + static_cast<double>(i) * step;
}

namespace {

double evaluate_cell(const SweepRequest& req, const std::map<std::string, double>& params) {
  auto get = [&](const char* name) {
    auto it = params.find(name);
    if (it == params.end())
      throw std::invalid_argument(std::string("sweep parameter missing: ") + name);
    return it->second;
  };
  switch (req.kind) {
    case BiasKind::Confounding: {
      double beta = get("beta"), gamma = get("gamma");
      if (req.standardized) return conf_bias_linear_standardized(beta, gamma);
      return conf_bias_linear(ConfoundingModel{0.0, beta, gamma});
    }
    case BiasKind::Selection: {
      double alpha = get("alpha"), eta = get("eta"), eps = get("epsilon");
      if (req.standardized) return sel_bias_linear_standardized(alpha, eta, eps);
      return sel_bias_linear(CollidingModel{alpha, eta, eps});
    }
    case BiasKind::Measurement: {
      double beta = get("beta"), gamma = get("gamma"), lambda = get("lambda");
      if (req.standardized) return meas_bias_linear_standardized(beta, gamma, lambda);
      return meas_bias_linear(MeasurementModel{0.0, beta, gamma, lambda});
    }
  }
  throw std::invalid_argument("bad bias kind");
}

}  // namespace

SweepGrid sweep(const SweepRequest& request) {
  if (request.axes.empty() || request.axes.size() > 2)
    throw std::invalid_argument("sweep supports 1 or 2 axes");
  auto names = sweep_parameters(request.kind);
  for (const auto& axis : request.axes)
    if (std::find(names.begin(), names.end(), axis.name) == names.end())
      throw std::invalid_argument("axis " + axis.name + " is not a parameter of " +
                                  to_string(request.kind));
  for (const auto& [k, v] : request.fixed)
    if (std::find(names.begin(), names.end(), k) == names.end())
      throw std::invalid_argument("fixed parameter " + k + " is not a parameter of " +
                                  to_string(request.kind));

  SweepGrid grid;
  grid.request = request;
  for (const auto& axis : request.axes) grid.coordinate_names.push_back(axis.name);

  std::size_t total = 1;
  std::vector<std::size_t> counts;
  for (const auto& axis : request.axes) {
    counts.push_back(axis.point_count());
    total *= counts.back();
  }
  grid.coordinates.resize(total);
  grid.values.assign(total, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> cell_log(total);

  auto eval_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      std::vector<double> coord(request.axes.size());
      std::size_t rem = idx;
      for (std::size_t ax = request.axes.size(); ax-- > 0;) {
        coord[ax] = request.axes[ax].point(rem % counts[ax]);
        rem /= counts[ax];
      }
      std::map<std::string, double> params = request.fixed;
      for (std::size_t ax = 0; ax < request.axes.size(); ++ax)
        params[request.axes[ax].name] = coord[ax];
      grid.coordinates[idx] = coord;
      try {
        grid.values[idx] = evaluate_cell(request, params);
      } catch (const SingularError& e) {
        std::ostringstream msg;
        msg << "cell";
        for (std::size_t ax = 0; ax < coord.size(); ++ax)
          msg << " " << request.axes[ax].name << "=" << coord[ax];
        msg << ": " << e.what();
        cell_log[idx] = msg.str();
      }
    }
  };

  int threads = std::max(1, request.threads);
  if (threads == 1 || total < 64) {
    eval_range(0, total);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (total + threads - 1) / static_cast<std::size_t>(threads);
    for (int t = 0; t < threads; ++t) {
      std::size_t begin = static_cast<std::size_t>(t) * chunk;
      std::size_t end = std::min(total, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(eval_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  for (auto& entry : cell_log)
    if (!entry.empty()) grid.singularities.push_back(std::move(entry));
  return grid;
}

}  // namespace causalbias
