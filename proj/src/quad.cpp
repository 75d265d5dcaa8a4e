#include "lyaplab/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "lyaplab/errors.hpp"

namespace lyaplab {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double a, b, value, err;
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.err != y.err) return x.err < y.err;
    return x.a > y.a;
  }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double ah = std::abs(h);
  resk *= h;
  resabs *= ah;
  resasc *= ah;
  double err = std::abs((resk - resg * h));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps))
    err = std::max(50.0 * kEps * resabs, err);
  if (!std::isfinite(resk) || !std::isfinite(err))
    throw NumericalFailure("quadrature: integrand is not finite on a panel");
  return {a, b, resk, err};
}

struct Tail {
  double value = 0.0;
  double err = 0.0;
  bool divergent = false;
};

// Limit of the partial sums of the rung integrals (outermost rung first) by
// Wynn's epsilon algorithm, which removes several geometric components at
// once (a power singularity times a smooth factor). Returns the part of the
// limit not yet covered by the rungs.
Tail extrapolate_tail(const std::vector<double>& rungs) {
  Tail t;
  const std::size_t n = rungs.size();
  const double p0 = rungs[n - 3], p1 = rungs[n - 2], p2 = rungs[n - 1];
  if (p2 == 0.0 && p1 == 0.0) return t;
  const double r0 = p0 != 0.0 ? p1 / p0 : std::numeric_limits<double>::infinity();
  const double r1 = p1 != 0.0 ? p2 / p1 : std::numeric_limits<double>::infinity();
  if (r0 >= 0.999 && r1 >= 0.999) {
    t.divergent = true;
    return t;
  }
  if (!(r0 > 0.0 && r0 < 1.0 && r1 > 0.0 && r1 < 1.0)) {
    t.value = p2;
    t.err = 2.0 * std::abs(p2);
    return t;
  }
  constexpr std::size_t kUse = 14;
  const std::size_t first = n > kUse ? n - kUse : 0;
  std::vector<double> sums;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += rungs[k];
    if (k >= first) sums.push_back(acc);
  }
  const double covered = sums.back();
  // Column 0 already gives the plain ratio extrapolation as a fallback.
  double best = covered + p2 * r1 / (1.0 - r1);
  double best_err = std::abs(best - covered) * std::abs(r1 - r0) / ((1.0 - r1) * (1.0 - r1));
  std::vector<double> older(sums.size() + 1, 0.0);
  std::vector<double> cur = sums;
  std::vector<double> last_even;
  for (int col = 1; cur.size() >= 2; ++col) {
    std::vector<double> next(cur.size() - 1);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const double d = cur[i + 1] - cur[i];
      if (d == 0.0 || !std::isfinite(d)) {
        ok = false;
        break;
      }
      next[i] = older[i + 1] + 1.0 / d;
    }
    if (!ok) break;
    if (col % 2 == 0 && next.size() >= 3) {
      const std::size_t m = next.size();
      const double est = next[m - 1];
      const double e = std::abs(est - next[m - 2]) + std::abs(est - next[m - 3]);
      if (std::isfinite(est) && e < best_err) {
        best = est;
        best_err = e;
      }
    }
    older = cur;
    cur = std::move(next);
  }
  t.value = best - covered;
  t.err = best_err + 16.0 * kEps * std::abs(best);
  return t;
}

std::vector<double> clean_splits(double a, double b, std::span<const double> splits) {
  std::vector<double> s;
  for (double x : splits) {
    if (!std::isfinite(x)) throw DomainError("quadrature: non-finite split point");
    if (x >= a && x <= b) s.push_back(x);
  }
  std::sort(s.begin(), s.end());
  std::vector<double> out;
  for (double x : s) {
    const double scale = std::max({std::abs(x), std::abs(a), std::abs(b), 1e-300});
    if (!out.empty() && x - out.back() <= 64.0 * kEps * scale) continue;
    out.push_back(x);
  }
  // Snap near-endpoint splits onto the endpoints.
  for (double& x : out) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    if (x - a <= 64.0 * kEps * scale) x = a;
    if (b - x <= 64.0 * kEps * scale) x = b;
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, std::span<const double> split_points,
                              QuadTolerance tol, std::int64_t max_subdiv) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw DomainError("quadrature: need finite a < b");
  if (!(tol.abs >= 0.0) || !(tol.rel >= 0.0) || (tol.abs == 0.0 && tol.rel == 0.0))
    throw DomainError("quadrature: tolerance must be positive");
  if (max_subdiv < 1) throw DomainError("quadrature: max_subdiv must be >= 1");

  const std::vector<double> sing = clean_splits(a, b, split_points);
  const auto is_singular = [&](double x) {
    return std::find(sing.begin(), sing.end(), x) != sing.end();
  };

  std::vector<double> nodes{a};
  for (double s : sing)
    if (s > a && s < b) nodes.push_back(s);
  nodes.push_back(b);

  std::priority_queue<Panel, std::vector<Panel>, ByError> queue;
  std::vector<Tail> tails;
  bool divergent = false;

  // Ladder of rungs [s + L 2^-(k+1), s + L 2^-k] approaching s from the side
  // of `far` (far - s = +-L).
  const auto ladder = [&](double s, double far) {
    const double len = far - s;
    const double floor = std::max(std::abs(len) * 0x1.0p-60, std::abs(s) * 0x1.0p-26);
    std::vector<double> rungs;
    double outer = far;
    for (double d = 0.5 * len; std::abs(d) >= floor; d *= 0.5) {
      const double inner = s + d;
      if (inner == outer || inner == s) break;
      const Panel p = inner < outer ? gk15(f, inner, outer) : gk15(f, outer, inner);
      queue.push(p);
      rungs.push_back(p.value);
      outer = inner;
    }
    // Innermost gap [s, outer].
    if (rungs.size() >= 3) {
      const Tail t = extrapolate_tail(rungs);
      divergent = divergent || t.divergent;
      tails.push_back(t);
    } else if (outer != s) {
      const Panel p = outer > s ? gk15(f, s, outer) : gk15(f, outer, s);
      queue.push(p);
    }
  };

  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double l = nodes[i];
    const double r = nodes[i + 1];
    const bool sl = is_singular(l);
    const bool sr = is_singular(r);
    if (sl && sr) {
      const double m = 0.5 * (l + r);
      ladder(l, m);
      ladder(r, m);
    } else if (sl) {
      ladder(l, r);
    } else if (sr) {
      ladder(r, l);
    } else {
      queue.push(gk15(f, l, r));
    }
  }

  QuadResult res;
  const auto totals = [&](double& value, double& err) {
    value = 0.0;
    err = 0.0;
    std::vector<Panel> all;
    auto copy = queue;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const Panel& p : all) {
      value += p.value;
      err += p.err;
    }
    for (const Tail& t : tails) {
      value += t.value;
      err += t.err;
    }
  };
  const auto target = [&](double value) { return std::max(tol.abs, tol.rel * std::abs(value)); };

  // Running sums drive the loop; the final numbers are re-summed in a fixed
  // order.
  double value = 0.0, err = 0.0;
  totals(value, err);
  double tail_err = 0.0;
  for (const Tail& t : tails) tail_err += t.err;
  std::vector<Panel> frozen;
  std::int64_t subdiv = 0;
  // Subdivision cannot shrink the extrapolation error; stop once it alone
  // exceeds the target.
  while (!divergent && err > target(value) && tail_err <= target(value) &&
         subdiv < max_subdiv && !queue.empty()) {
    const Panel p = queue.top();
    queue.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b) || p.b - p.a <= 4.0 * kEps * std::max(std::abs(p.a), std::abs(p.b))) {
      frozen.push_back(p);
      continue;
    }
    const Panel left = gk15(f, p.a, m);
    const Panel right = gk15(f, m, p.b);
    value += left.value + right.value - p.value;
    err += left.err + right.err - p.err;
    queue.push(left);
    queue.push(right);
    ++subdiv;
  }
  for (const Panel& p : frozen) queue.push(p);
  totals(value, err);
  res.value = value;
  res.err_est = err;
  res.subdivisions = subdiv;
  res.divergent = divergent;
  res.converged = !divergent && err <= target(value);
  return res;
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, std::span<const double> split_points,
                              double tol, std::int64_t max_subdiv) {
  return integrate_adaptive(f, a, b, split_points, QuadTolerance{tol, 0.0}, max_subdiv);
}

double quadr_bound_check(std::complex<double> d, double moment_alpha) {
  const double ad = std::abs(d);
  if (!(ad > 0.0) || !(ad <= 1.0))
    throw DomainError("quadr_bound_check: need 0 < |d| <= 1");
  if (!(moment_alpha > 0.0 && moment_alpha < 1.0))
    throw DomainError("quadr_bound_check: moment_alpha must lie in (0, 1)");
  const auto f = [&](double x) {
    return std::pow(std::abs(x) * std::abs(x - d), -moment_alpha);
  };
  const double splits[] = {0.0, d.real()};
  const QuadResult r = integrate_adaptive(f, -1.0, 1.0, splits, QuadTolerance{1e-12, 1e-8});
  if (!r.converged) throw NumericalFailure("quadr_bound_check: quadrature did not converge");
  return std::pow(ad, 2.0 * moment_alpha - 1.0) * r.value;
}

}  // namespace lyaplab
