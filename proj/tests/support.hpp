#pragma once

// Shared generators for property-style tests. Everything here is seeded and
// deterministic; nothing depends on the code paths under test.

#include <vector>

#include "causalbias/joint_table.hpp"
#include "causalbias/rng.hpp"

namespace testsupport {

using causalbias::JointTable;
using causalbias::Rng;

// Random dense joint table over k binary variables (normalized positive cells).
inline JointTable random_table(Rng& rng, std::vector<std::string> vars) {
  std::size_t cells = std::size_t{1} << vars.size();
  std::vector<double> p(cells);
  double total = 0.0;
  for (auto& v : p) {
    v = rng.uniform(0.01, 1.0);
    total += v;
  }
  for (auto& v : p) v /= total;
  // fix up rounding so the constructor's 1e-12 sum check holds
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) sum += p[i];
  p.back() = 1.0 - sum;
  return JointTable(std::move(vars), std::move(p));
}

// Joint over (A,B,Y) with A independent of B.
inline JointTable random_independent_ab(Rng& rng) {
  double pa = rng.uniform(0.1, 0.9);
  double pb = rng.uniform(0.1, 0.9);
  std::vector<double> p(8);
  for (int a : {0, 1})
    for (int b : {0, 1}) {
      double py1 = rng.uniform(0.02, 0.98);
      double base = (a ? pa : 1 - pa) * (b ? pb : 1 - pb);
      p[static_cast<std::size_t>((a << 2) | (b << 1) | 1)] = base * py1;
      p[static_cast<std::size_t>((a << 2) | (b << 1))] = base * (1 - py1);
    }
  return JointTable({"A", "B", "Y"}, std::move(p));
}

// Joint over (Z,A,B,Y): Z -> A, (A,B,Z) -> Y, B independent of (A,Z).
inline JointTable random_conf_interaction(Rng& rng) {
  double pz = rng.uniform(0.1, 0.9);
  double pa_z1 = rng.uniform(0.1, 0.9), pa_z0 = rng.uniform(0.1, 0.9);
  double pb = rng.uniform(0.1, 0.9);
  double py[2][2][2];  // [a][b][z]
  for (int a : {0, 1})
    for (int b : {0, 1})
      for (int z : {0, 1}) py[a][b][z] = rng.uniform(0.02, 0.98);
  std::vector<double> p(16);
  for (int z : {0, 1})
    for (int a : {0, 1})
      for (int b : {0, 1})
        for (int y : {0, 1}) {
          double pr = (z ? pz : 1 - pz) * (a ? (z ? pa_z1 : pa_z0) : (z ? 1 - pa_z1 : 1 - pa_z0)) *
                      (b ? pb : 1 - pb) * (y ? py[a][b][z] : 1 - py[a][b][z]);
          p[static_cast<std::size_t>((z << 3) | (a << 2) | (b << 1) | y)] = pr;
        }
  return JointTable({"Z", "A", "B", "Y"}, std::move(p));
}

// Joint over (Z,A,W,Y): Z confounder, W collider of A and Y.
inline JointTable random_conf_collider(Rng& rng) {
  double pz = rng.uniform(0.1, 0.9);
  double pa_z[2] = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
  double py_az[2][2];  // [a][z]
  for (int a : {0, 1})
    for (int z : {0, 1}) py_az[a][z] = rng.uniform(0.05, 0.95);
  double pw_ay[2][2];  // [a][y]
  for (int a : {0, 1})
    for (int y : {0, 1}) pw_ay[a][y] = rng.uniform(0.05, 0.95);
  std::vector<double> p(16);
  for (int z : {0, 1})
    for (int a : {0, 1})
      for (int w : {0, 1})
        for (int y : {0, 1}) {
          double pr = (z ? pz : 1 - pz) * (a ? pa_z[z] : 1 - pa_z[z]) *
                      (y ? py_az[a][z] : 1 - py_az[a][z]) * (w ? pw_ay[a][y] : 1 - pw_ay[a][y]);
          p[static_cast<std::size_t>((z << 3) | (a << 2) | (w << 1) | y)] = pr;
        }
  return JointTable({"Z", "A", "W", "Y"}, std::move(p));
}

// Joint over (Z,A,T,W,Y): Z latent confounder with proxy T, W collider.
inline JointTable random_conf_proxy_collider(Rng& rng) {
  double pz = rng.uniform(0.1, 0.9);
  double pa_z[2] = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
  double pt_z[2] = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
  double py_az[2][2];
  for (int a : {0, 1})
    for (int z : {0, 1}) py_az[a][z] = rng.uniform(0.05, 0.95);
  double pw_ay[2][2];
  for (int a : {0, 1})
    for (int y : {0, 1}) pw_ay[a][y] = rng.uniform(0.05, 0.95);
  std::vector<double> p(32);
  for (int z : {0, 1})
    for (int a : {0, 1})
      for (int t : {0, 1})
        for (int w : {0, 1})
          for (int y : {0, 1}) {
            double pr = (z ? pz : 1 - pz) * (a ? pa_z[z] : 1 - pa_z[z]) *
                        (t ? pt_z[z] : 1 - pt_z[z]) * (y ? py_az[a][z] : 1 - py_az[a][z]) *
                        (w ? pw_ay[a][y] : 1 - pw_ay[a][y]);
            p[static_cast<std::size_t>((z << 4) | (a << 3) | (t << 2) | (w << 1) | y)] = pr;
          }
  return JointTable({"Z", "A", "T", "W", "Y"}, std::move(p));
}

}  // namespace testsupport
