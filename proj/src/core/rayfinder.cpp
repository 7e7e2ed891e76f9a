#include "rayfinder.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rl {

namespace {

Vec3 checked_unit(const Vec3& v, const char* what) {
  double n = v.norm();
  if (std::abs(n - 1.0) > 1e-9) fail(Err::invalid_argument, std::string(what) + " must be a unit vector");
  return v / n;
}

void check_direction_pair(const Vec3& omega, const Vec3& theta) {
  if ((theta - omega).norm() < 1e-12) fail(Err::theta_equals_omega, "theta coincides with omega");
}

double segment_length(const Vec3& a, const Vec3& b) {
  double len = (b - a).norm();
  if (len < 1e-12) fail(Err::degenerate_segment, "consecutive reflection points coincide");
  return len;
}

}  // namespace

double fermat_value(const Vec3& omega, const Vec3& theta, const std::vector<Vec3>& points) {
  if (points.empty()) fail(Err::invalid_argument, "a reflecting ray needs at least one point");
  double value = points.front().dot(omega) - points.back().dot(theta);
  for (size_t i = 0; i + 1 < points.size(); ++i) value += segment_length(points[i], points[i + 1]);
  return value;
}

std::vector<Vec3> chain_directions(const Vec3& omega, const Vec3& theta,
                                   const std::vector<Vec3>& points) {
  std::vector<Vec3> d;
  d.reserve(points.size() + 1);
  d.push_back(omega);
  for (size_t i = 0; i + 1 < points.size(); ++i)
    d.push_back((points[i + 1] - points[i]) / segment_length(points[i], points[i + 1]));
  d.push_back(theta);
  return d;
}

std::vector<SurfacePoint> chain_surface_points(const Scene& scene, const std::vector<Vec3>& points,
                                               const std::vector<int>& bodies) {
  if (points.size() != bodies.size())
    fail(Err::invalid_argument, "points and bodies must have equal length");
  std::vector<SurfacePoint> sp;
  sp.reserve(points.size());
  for (size_t i = 0; i < points.size(); ++i) sp.push_back(surface_point(scene, bodies[i], points[i]));
  return sp;
}

// Full-space gradient of F at point i.
static Vec3 full_gradient(const Vec3& omega, const Vec3& theta, const std::vector<SurfacePoint>& sp,
                          size_t i) {
  const size_t m = sp.size();
  Vec3 g = Vec3::Zero();
  if (i == 0)
    g += omega;
  else
    g += (sp[i].x - sp[i - 1].x) / segment_length(sp[i - 1].x, sp[i].x);
  if (i + 1 == m)
    g -= theta;
  else
    g += (sp[i].x - sp[i + 1].x) / segment_length(sp[i].x, sp[i + 1].x);
  return g;
}

Eigen::VectorXd fermat_gradient(const Vec3& omega, const Vec3& theta,
                                const std::vector<SurfacePoint>& sp) {
  const size_t m = sp.size();
  Eigen::VectorXd g(2 * m);
  for (size_t i = 0; i < m; ++i) {
    Vec3 gi = full_gradient(omega, theta, sp, i);
    g[2 * i] = gi.dot(sp[i].e1);
    g[2 * i + 1] = gi.dot(sp[i].e2);
  }
  return g;
}

Eigen::MatrixXd fermat_hessian(const Vec3& omega, const Vec3& theta,
                               const std::vector<SurfacePoint>& sp) {
  const size_t m = sp.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  // Euclidean second derivative of each segment length |x_i - x_{i+1}|:
  // P/len on both diagonal blocks, -P/len on the cross block, P = I - u u^T.
  for (size_t i = 0; i + 1 < m; ++i) {
    double len = segment_length(sp[i].x, sp[i + 1].x);
    Vec3 u = (sp[i + 1].x - sp[i].x) / len;
    Mat3 P = (Mat3::Identity() - u * u.transpose()) / len;
    const Vec3 ei[2] = {sp[i].e1, sp[i].e2};
    const Vec3 ej[2] = {sp[i + 1].e1, sp[i + 1].e2};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        H(2 * i + a, 2 * i + b) += ei[a].dot(P * ei[b]);
        H(2 * (i + 1) + a, 2 * (i + 1) + b) += ej[a].dot(P * ej[b]);
        double cross = -ei[a].dot(P * ej[b]);
        H(2 * i + a, 2 * (i + 1) + b) += cross;
        H(2 * (i + 1) + b, 2 * i + a) += cross;
      }
  }
  // Curvature correction from the surface constraint: the second-order term of
  // the normal parametrization x(s) = x + E s - (s^T II s) nu / 2.
  for (size_t i = 0; i < m; ++i) {
    double gn = full_gradient(omega, theta, sp, i).dot(sp[i].nu);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) H(2 * i + a, 2 * i + b) -= gn * sp[i].second_form(a, b);
  }
  return H;
}

namespace {

double grad_sup_norm(const Eigen::VectorXd& g) { return g.lpNorm<Eigen::Infinity>(); }

// One validation pass over a converged chain. Throws on violations.
void validate_ray(const Scene& scene, ReflectingRay& ray) {
  auto sp = chain_surface_points(scene, ray.points, ray.bodies);
  auto dirs = chain_directions(ray.omega, ray.theta, ray.points);
  ray.residual = 0.0;
  for (size_t i = 0; i < sp.size(); ++i) {
    double dn = dirs[i].dot(sp[i].nu);
    if (std::abs(dn) < tol::tangency) fail(Err::tangent_ray, "grazing reflection");
    if (dn > 0.0) fail(Err::obstructed_path, "reflection on the far side of the body");
    ray.residual = std::max(ray.residual, (reflect(dirs[i], sp[i].nu) - dirs[i + 1]).norm());
  }
  if (ray.residual > tol::residual) fail(Err::no_convergence, "specular residual above tolerance");
  // incoming segment must come in from outside the reference ball unobstructed
  double back = ball_exit(scene, ray.points.front(), -ray.omega);
  auto in_hit = first_hit(scene, ray.points.front() - (back + scene.a) * ray.omega, ray.omega);
  if (!in_hit || (in_hit->point.x - ray.points.front()).norm() > 1e-6)
    fail(Err::obstructed_path, "incoming segment is blocked");
  // interior segments end on the next body without an earlier strike
  for (size_t i = 0; i + 1 < ray.points.size(); ++i) {
    auto h = first_hit(scene, ray.points[i], dirs[i + 1]);
    if (!h || h->point.body != ray.bodies[i + 1] ||
        (h->point.x - ray.points[i + 1]).norm() > 1e-6)
      fail(Err::obstructed_path, "interior segment is blocked");
  }
  // outgoing segment leaves cleanly
  if (first_hit(scene, ray.points.back(), ray.theta))
    fail(Err::obstructed_path, "outgoing segment is blocked");
}

}  // namespace

ReflectingRay refine_ray(const Scene& scene, const Vec3& omega_in, const Vec3& theta_in,
                         const std::vector<Vec3>& initial_points, const std::vector<int>& bodies,
                         double grad_tol) {
  Vec3 omega = checked_unit(omega_in, "omega");
  Vec3 theta = checked_unit(theta_in, "theta");
  // theta == omega is allowed here: symmetric scenes have genuine
  // forward-direction chains, and an explicit chain pins the geometry.
  if (initial_points.empty()) fail(Err::invalid_argument, "empty initial chain");
  if (initial_points.size() != bodies.size())
    fail(Err::invalid_argument, "points and bodies must have equal length");

  std::vector<Vec3> pts = initial_points;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (bodies[i] < 0 || bodies[i] >= static_cast<int>(scene.bodies.size()))
      fail(Err::invalid_argument, "body index out of range");
    pts[i] = surface_project(scene.bodies[bodies[i]], pts[i]);
  }

  const size_t m = pts.size();
  const int max_iter = 100;
  double mu = 0.0;  // Levenberg damping, grown on rejected steps
  auto sp = chain_surface_points(scene, pts, bodies);
  Eigen::VectorXd g = fermat_gradient(omega, theta, sp);
  double phi = g.squaredNorm();
  int it = 0;
  for (; it < max_iter && grad_sup_norm(g) >= grad_tol; ++it) {
    Eigen::MatrixXd H = fermat_hessian(omega, theta, sp);
    bool accepted = false;
    for (int attempt = 0; attempt < 8 && !accepted; ++attempt) {
      Eigen::MatrixXd Hd = H + mu * Eigen::MatrixXd::Identity(2 * m, 2 * m);
      Eigen::VectorXd step = Hd.fullPivLu().solve(-g);
      if (!step.allFinite()) {
        mu = std::max(1e-6, mu * 10.0);
        continue;
      }
      // Armijo backtracking on |grad|^2 along the retracted step
      double s = 1.0;
      for (int bt = 0; bt < 25; ++bt, s *= 0.5) {
        std::vector<Vec3> trial(m);
        bool ok = true;
        for (size_t i = 0; i < m; ++i) {
          Vec3 move = s * (step[2 * i] * sp[i].e1 + step[2 * i + 1] * sp[i].e2);
          trial[i] = surface_project(scene.bodies[bodies[i]], sp[i].x + move);
          if (!trial[i].allFinite()) ok = false;
        }
        if (!ok) continue;
        std::vector<SurfacePoint> sp_trial;
        Eigen::VectorXd g_trial;
        try {
          sp_trial = chain_surface_points(scene, trial, bodies);
          g_trial = fermat_gradient(omega, theta, sp_trial);
        } catch (const Error&) {
          continue;  // degenerate trial chain; shrink the step
        }
        double phi_trial = g_trial.squaredNorm();
        if (phi_trial <= phi * (1.0 - 1e-4 * s) || phi_trial < grad_tol * grad_tol) {
          pts = std::move(trial);
          sp = std::move(sp_trial);
          g = std::move(g_trial);
          phi = phi_trial;
          accepted = true;
          mu = mu * 0.25;
          if (mu < 1e-14) mu = 0.0;
          break;
        }
      }
      if (!accepted) mu = std::max(1e-6, mu * 10.0);
    }
    if (!accepted) break;
  }
  if (grad_sup_norm(g) >= grad_tol)
    fail(Err::no_convergence, "Newton refinement did not reach the gradient tolerance");

  ReflectingRay ray;
  ray.omega = omega;
  ray.theta = theta;
  ray.points = pts;
  ray.bodies = bodies;
  ray.sojourn = fermat_value(omega, theta, pts);
  validate_ray(scene, ray);
  return ray;
}

namespace {

// Crude initial chain for a body word: aim each point at the bisector of the
// directions toward its neighbours along the word.
std::vector<Vec3> word_seed(const Scene& scene, const Vec3& omega, const Vec3& theta,
                            const std::vector<int>& word) {
  const size_t m = word.size();
  std::vector<Vec3> anchors(m + 2);
  anchors[0] = scene.bodies[word.front()].center - 3.0 * scene.a * omega;
  for (size_t i = 0; i < m; ++i) anchors[i + 1] = scene.bodies[word[i]].center;
  anchors[m + 1] = scene.bodies[word.back()].center + 3.0 * scene.a * theta;
  std::vector<Vec3> pts(m);
  for (size_t i = 0; i < m; ++i) {
    const Body& b = scene.bodies[word[i]];
    Vec3 to_prev = anchors[i] - b.center;
    Vec3 to_next = anchors[i + 2] - b.center;
    Vec3 bis = to_prev.normalized() + to_next.normalized();
    if (bis.norm() < 1e-9) bis = to_prev.normalized();  // antipodal anchors
    pts[i] = surface_project(b, b.center + bis.normalized() * b.max_extent());
  }
  return pts;
}

bool same_ray(const ReflectingRay& a, const ReflectingRay& b) {
  if (a.points.size() != b.points.size() || a.bodies != b.bodies) return false;
  double d = 0.0;
  for (size_t i = 0; i < a.points.size(); ++i)
    d = std::max(d, (a.points[i] - b.points[i]).norm());
  return d < tol::merge;
}

}  // namespace

Vec3 project_to_zplane(const Scene& scene, const Vec3& omega, const Vec3& x) {
  return x - (x.dot(omega) + scene.a) * omega;
}

FindRaysResult find_rays(const Scene& scene, const Vec3& omega_in, const Vec3& theta_in, int m_max,
                         int grid_density) {
  Vec3 omega = checked_unit(omega_in, "omega");
  Vec3 theta = checked_unit(theta_in, "theta");
  check_direction_pair(omega, theta);
  if (m_max < 0) fail(Err::invalid_argument, "m_max must be >= 0");
  if (grid_density < 1) fail(Err::invalid_argument, "grid_density must be >= 1");

  FindRaysResult out;
  if (m_max == 0) return out;

  struct Seed {
    std::vector<Vec3> pts;
    std::vector<int> word;
    double miss = 0.0;  // angle distance of the traced exit from theta
  };
  std::vector<Seed> seeds;

  // Shooting grid over the launch window of Z_omega.
  Vec3 e1, e2;
  tangent_frame(omega, e1, e2);
  Vec3 origin = -scene.a * omega;
  double span = 1.15 * scene.rho;
  int n = std::max(grid_density, 2);
  std::map<std::vector<int>, std::vector<Seed>> buckets;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s1 = span * (2.0 * (i + 0.5) / n - 1.0);
      double s2 = span * (2.0 * (j + 0.5) / n - 1.0);
      PhasePoint z{origin + s1 * e1 + s2 * e2, omega};
      Trajectory traj;
      try {
        traj = trace(scene, z, m_max);
      } catch (const Error&) {
        continue;
      }
      if (traj.status != TraceStatus::escaped || traj.hits.empty()) continue;
      Seed s;
      s.miss = (traj.exit->xi - theta).norm();
      for (const SurfacePoint& h : traj.hits) {
        s.pts.push_back(h.x);
        s.word.push_back(h.body);
      }
      buckets[s.word].push_back(std::move(s));
    }
  for (auto& [word, v] : buckets) {
    std::sort(v.begin(), v.end(), [](const Seed& a, const Seed& b) { return a.miss < b.miss; });
    for (size_t k = 0; k < v.size() && k < 3; ++k) seeds.push_back(v[k]);
  }

  // Combinatorial word seeds (no immediate repetitions).
  const int nb = static_cast<int>(scene.bodies.size());
  std::vector<std::vector<int>> words;
  std::vector<int> cur;
  auto grow = [&](auto&& self, int depth) -> void {
    if (words.size() >= 4096) return;
    if (depth > 0) words.push_back(cur);
    if (depth == m_max) return;
    for (int b = 0; b < nb; ++b) {
      if (!cur.empty() && cur.back() == b) continue;
      cur.push_back(b);
      self(self, depth + 1);
      cur.pop_back();
    }
  };
  grow(grow, 0);
  for (const auto& w : words) seeds.push_back({word_seed(scene, omega, theta, w), w, 0.0});

  out.seeds_tried = static_cast<int>(seeds.size());
  for (const Seed& s : seeds) {
    ReflectingRay ray;
    try {
      ray = refine_ray(scene, omega, theta, s.pts, s.word);
    } catch (const Error&) {
      continue;
    }
    ++out.seeds_converged;
    bool dup = false;
    for (const ReflectingRay& r : out.rays)
      if (same_ray(r, ray)) {
        dup = true;
        break;
      }
    if (!dup) out.rays.push_back(std::move(ray));
  }
  std::sort(out.rays.begin(), out.rays.end(), [](const ReflectingRay& a, const ReflectingRay& b) {
    if (a.sojourn != b.sojourn) return a.sojourn < b.sojourn;
    if (a.m() != b.m()) return a.m() < b.m();
    if (a.bodies != b.bodies) return a.bodies < b.bodies;
    for (int i = 0; i < a.m(); ++i)
      for (int c = 0; c < 3; ++c)
        if (a.points[i][c] != b.points[i][c]) return a.points[i][c] < b.points[i][c];
    return false;
  });
  return out;
}

double sojourn_hyperplane(const Scene& scene, const ReflectingRay& ray) {
  if (ray.points.empty()) fail(Err::invalid_argument, "ray has no points");
  double total = (project_to_zplane(scene, ray.omega, ray.points.front()) - ray.points.front()).norm();
  for (size_t i = 0; i + 1 < ray.points.size(); ++i)
    total += segment_length(ray.points[i], ray.points[i + 1]);
  total += (project_to_zplane(scene, -ray.theta, ray.points.back()) - ray.points.back()).norm();
  return total - 2.0 * scene.a;
}

}  // namespace rl
