#pragma once

// Dormand-Prince 8(5,3) explicit Runge-Kutta integrator with step-size control
// and the 7th-order continuous extension. Generic over the right-hand side:
//   void f(double t, std::span<const double> y, std::span<double> dydt)

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

namespace trimer::ode {

template <class F>
concept System = requires(F& f, double t, std::span<const double> y, std::span<double> dy) {
  f(t, y, dy);
};

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  ///< 0 selects the step automatically
  double max_step = 1.0;
  double min_step = 1e-12;
  std::size_t max_steps = 10'000'000;
};

enum class Status { Success, StepUnderflow, NonFinite, StepLimit };

struct Outcome {
  Status status = Status::Success;
  double t_reached = 0.0;  ///< last time with an accepted, finite state
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

namespace dop853 {

// Hairer, Norsett & Wanner coefficients.
inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;
inline constexpr double c14 = 0.1e+00;
inline constexpr double c15 = 0.2e+00;
inline constexpr double c16 = 0.777777777777777777777777777778e+00;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

inline constexpr double a141 = 5.61675022830479523392909219681e-2;
inline constexpr double a147 = 2.53500210216624811088794765333e-1;
inline constexpr double a148 = -2.46239037470802489917441475441e-1;
inline constexpr double a149 = -1.24191423263816360469010140626e-1;
inline constexpr double a1410 = 1.5329179827876569731206322685e-1;
inline constexpr double a1411 = 8.20105229563468988491666602057e-3;
inline constexpr double a1412 = 7.56789766054569976138603589584e-3;
inline constexpr double a1413 = -8.298e-3;
inline constexpr double a151 = 3.18346481635021405060768473261e-2;
inline constexpr double a156 = 2.83009096723667755288322961402e-2;
inline constexpr double a157 = 5.35419883074385676223797384372e-2;
inline constexpr double a158 = -5.49237485713909884646569340306e-2;
inline constexpr double a1511 = -1.08347328697249322858509316994e-4;
inline constexpr double a1512 = 3.82571090835658412954920192323e-4;
inline constexpr double a1513 = -3.40465008687404560802977114492e-4;
inline constexpr double a1514 = 1.41312443674632500278074618366e-1;
inline constexpr double a161 = -4.28896301583791923408573538692e-1;
inline constexpr double a166 = -4.69762141536116384314449447206e0;
inline constexpr double a167 = 7.68342119606259904184240953878e0;
inline constexpr double a168 = 4.06898981839711007970213554331e0;
inline constexpr double a169 = 3.56727187455281109270669543021e-1;
inline constexpr double a1613 = -1.39902416515901462129418009734e-3;
inline constexpr double a1614 = 2.9475147891527723389556272149e0;
inline constexpr double a1615 = -9.15095847217987001081870187138e0;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

inline constexpr double bhh1 = 0.244094488188976377952755905512e+00;
inline constexpr double bhh2 = 0.733846688281611857341361741547e+00;
inline constexpr double bhh3 = 0.220588235294117647058823529412e-01;

inline constexpr double er1 = 0.1312004499419488073250102996e-01;
inline constexpr double er6 = -0.1225156446376204440720569753e+01;
inline constexpr double er7 = -0.4957589496572501915214079952e+00;
inline constexpr double er8 = 0.1664377182454986536961530415e+01;
inline constexpr double er9 = -0.3503288487499736816886487290e+00;
inline constexpr double er10 = 0.3341791187130174790297318841e+00;
inline constexpr double er11 = 0.8192320648511571246570742613e-01;
inline constexpr double er12 = -0.2235530786388629525884427845e-01;

inline constexpr double d41 = -0.84289382761090128651353491142e+01;
inline constexpr double d46 = 0.56671495351937776962531783590e+00;
inline constexpr double d47 = -0.30689499459498916912797304727e+01;
inline constexpr double d48 = 0.23846676565120698287728149680e+01;
inline constexpr double d49 = 0.21170345824450282767155149946e+01;
inline constexpr double d410 = -0.87139158377797299206789907490e+00;
inline constexpr double d411 = 0.22404374302607882758541771650e+01;
inline constexpr double d412 = 0.63157877876946881815570249290e+00;
inline constexpr double d413 = -0.88990336451333310820698117400e-01;
inline constexpr double d414 = 0.18148505520854727256656404962e+02;
inline constexpr double d415 = -0.91946323924783554000451984436e+01;
inline constexpr double d416 = -0.44360363875948939664310572000e+01;
inline constexpr double d51 = 0.10427508642579134603413151009e+02;
inline constexpr double d56 = 0.24228349177525818288430175319e+03;
inline constexpr double d57 = 0.16520045171727028198505394887e+03;
inline constexpr double d58 = -0.37454675472269020279518312152e+03;
inline constexpr double d59 = -0.22113666853125306036270938578e+02;
inline constexpr double d510 = 0.77334326684722638389603898808e+01;
inline constexpr double d511 = -0.30674084731089398182061213626e+02;
inline constexpr double d512 = -0.93321305264302278729567221706e+01;
inline constexpr double d513 = 0.15697238121770843886131091075e+02;
inline constexpr double d514 = -0.31139403219565177677282850411e+02;
inline constexpr double d515 = -0.93529243588444783865713862664e+01;
inline constexpr double d516 = 0.35816841486394083752465898540e+02;
inline constexpr double d61 = 0.19985053242002433820987653617e+02;
inline constexpr double d66 = -0.38703730874935176555105901742e+03;
inline constexpr double d67 = -0.18917813819516756882830838328e+03;
inline constexpr double d68 = 0.52780815920542364900561016686e+03;
inline constexpr double d69 = -0.11573902539959630126141871134e+02;
inline constexpr double d610 = 0.68812326946963000169666922661e+01;
inline constexpr double d611 = -0.10006050966910838403183860980e+01;
inline constexpr double d612 = 0.77771377980534432092869265740e+00;
inline constexpr double d613 = -0.27782057523535084065932004339e+01;
inline constexpr double d614 = -0.60196695231264120758267380846e+02;
inline constexpr double d615 = 0.84320405506677161018159903784e+02;
inline constexpr double d616 = 0.11992291136182789328035130030e+02;
inline constexpr double d71 = -0.25693933462703749003312586129e+02;
inline constexpr double d76 = -0.15418974869023643374053993627e+03;
inline constexpr double d77 = -0.23152937917604549567536039109e+03;
inline constexpr double d78 = 0.35763911791061412378285349910e+03;
inline constexpr double d79 = 0.93405324183624310003907691704e+02;
inline constexpr double d710 = -0.37458323136451633156875139351e+02;
inline constexpr double d711 = 0.10409964950896230045147246184e+03;
inline constexpr double d712 = 0.29840293426660503123344363579e+02;
inline constexpr double d713 = -0.43533456590011143754432175058e+02;
inline constexpr double d714 = 0.96324553959188282948394950600e+02;
inline constexpr double d715 = -0.39177261675615439165231486172e+02;
inline constexpr double d716 = -0.14972683625798562581422125276e+03;

inline constexpr int kDesignOrder = 8;

}  // namespace dop853

namespace detail {

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Work arrays for one step: stage derivatives k1..k16 plus scratch.
struct Stages {
  explicit Stages(std::size_t n)
      : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), k8(n), k9(n), k10(n), k11(n),
        k12(n), k13(n), k14(n), k15(n), k16(n), tmp(n), y_new(n) {}
  std::vector<double> k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, k13, k14, k15,
      k16, tmp, y_new;
};

// Twelve-stage step from (t, y) with k1 = f(t, y) already in place. Leaves the
// 8th-order solution in s.y_new and its increment (sum b_i k_i) in s.k4.
template <System F>
void dop853_step(F& f, double t, double h, std::span<const double> y, Stages& s) {
  using namespace dop853;
  const std::size_t n = y.size();
  auto stage = [&](double c, auto&& combine, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) s.tmp[i] = y[i] + h * combine(i);
    f(t + c * h, std::span<const double>(s.tmp), std::span<double>(out));
  };
  stage(c2, [&](std::size_t i) { return a21 * s.k1[i]; }, s.k2);
  stage(c3, [&](std::size_t i) { return a31 * s.k1[i] + a32 * s.k2[i]; }, s.k3);
  stage(c4, [&](std::size_t i) { return a41 * s.k1[i] + a43 * s.k3[i]; }, s.k4);
  stage(c5, [&](std::size_t i) { return a51 * s.k1[i] + a53 * s.k3[i] + a54 * s.k4[i]; }, s.k5);
  stage(c6, [&](std::size_t i) { return a61 * s.k1[i] + a64 * s.k4[i] + a65 * s.k5[i]; }, s.k6);
  stage(c7, [&](std::size_t i) {
    return a71 * s.k1[i] + a74 * s.k4[i] + a75 * s.k5[i] + a76 * s.k6[i];
  }, s.k7);
  stage(c8, [&](std::size_t i) {
    return a81 * s.k1[i] + a84 * s.k4[i] + a85 * s.k5[i] + a86 * s.k6[i] + a87 * s.k7[i];
  }, s.k8);
  stage(c9, [&](std::size_t i) {
    return a91 * s.k1[i] + a94 * s.k4[i] + a95 * s.k5[i] + a96 * s.k6[i] + a97 * s.k7[i] +
           a98 * s.k8[i];
  }, s.k9);
  stage(c10, [&](std::size_t i) {
    return a101 * s.k1[i] + a104 * s.k4[i] + a105 * s.k5[i] + a106 * s.k6[i] +
           a107 * s.k7[i] + a108 * s.k8[i] + a109 * s.k9[i];
  }, s.k10);
  stage(c11, [&](std::size_t i) {
    return a111 * s.k1[i] + a114 * s.k4[i] + a115 * s.k5[i] + a116 * s.k6[i] +
           a117 * s.k7[i] + a118 * s.k8[i] + a119 * s.k9[i] + a1110 * s.k10[i];
  }, s.k11);
  stage(1.0, [&](std::size_t i) {
    return a121 * s.k1[i] + a124 * s.k4[i] + a125 * s.k5[i] + a126 * s.k6[i] +
           a127 * s.k7[i] + a128 * s.k8[i] + a129 * s.k9[i] + a1210 * s.k10[i] +
           a1211 * s.k11[i];
  }, s.k12);
  for (std::size_t i = 0; i < n; ++i) {
    s.k4[i] = b1 * s.k1[i] + b6 * s.k6[i] + b7 * s.k7[i] + b8 * s.k8[i] + b9 * s.k9[i] +
              b10 * s.k10[i] + b11 * s.k11[i] + b12 * s.k12[i];
    s.y_new[i] = y[i] + h * s.k4[i];
  }
}

// Scaled error norm of the last step (<= 1 accepts).
inline double dop853_error(double h, std::span<const double> y, const Stages& s,
                           double rel_tol, double abs_tol) {
  using namespace dop853;
  const std::size_t n = y.size();
  double err3 = 0.0;
  double err5 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(s.y_new[i]));
    const double e3 = s.k4[i] - bhh1 * s.k1[i] - bhh2 * s.k9[i] - bhh3 * s.k12[i];
    const double e5 = er1 * s.k1[i] + er6 * s.k6[i] + er7 * s.k7[i] + er8 * s.k8[i] +
                      er9 * s.k9[i] + er10 * s.k10[i] + er11 * s.k11[i] + er12 * s.k12[i];
    err3 += (e3 / sk) * (e3 / sk);
    err5 += (e5 / sk) * (e5 / sk);
  }
  const double denom = err5 + 0.01 * err3;
  if (denom <= 0.0) return 0.0;
  return std::abs(h) * err5 / std::sqrt(static_cast<double>(n) * denom);
}

}  // namespace detail

/// Polynomial continuous extension over one accepted step [t0, t0 + h]. The
/// first four coefficient vectors form the cubic Hermite interpolant; the last
/// four lift it to 7th order.
class DenseStep {
 public:
  DenseStep() = default;

  template <System F>
  void build(F& f, double t0, double h, std::span<const double> y0, detail::Stages& s,
             std::size_t& evaluations) {
    using namespace dop853;
    const std::size_t n = y0.size();
    t0_ = t0;
    h_ = h;
    for (auto& r : r_) r.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double dy = s.y_new[i] - y0[i];
      const double bspl = h * s.k1[i] - dy;
      r_[0][i] = y0[i];
      r_[1][i] = dy;
      r_[2][i] = bspl;
      r_[3][i] = dy - h * s.k13[i] - bspl;
      r_[4][i] = d41 * s.k1[i] + d46 * s.k6[i] + d47 * s.k7[i] + d48 * s.k8[i] +
                 d49 * s.k9[i] + d410 * s.k10[i] + d411 * s.k11[i] + d412 * s.k12[i];
      r_[5][i] = d51 * s.k1[i] + d56 * s.k6[i] + d57 * s.k7[i] + d58 * s.k8[i] +
                 d59 * s.k9[i] + d510 * s.k10[i] + d511 * s.k11[i] + d512 * s.k12[i];
      r_[6][i] = d61 * s.k1[i] + d66 * s.k6[i] + d67 * s.k7[i] + d68 * s.k8[i] +
                 d69 * s.k9[i] + d610 * s.k10[i] + d611 * s.k11[i] + d612 * s.k12[i];
      r_[7][i] = d71 * s.k1[i] + d76 * s.k6[i] + d77 * s.k7[i] + d78 * s.k8[i] +
                 d79 * s.k9[i] + d710 * s.k10[i] + d711 * s.k11[i] + d712 * s.k12[i];
    }
    auto stage = [&](double c, auto&& combine, std::vector<double>& out) {
      for (std::size_t i = 0; i < n; ++i) s.tmp[i] = y0[i] + h * combine(i);
      f(t0 + c * h, std::span<const double>(s.tmp), std::span<double>(out));
      ++evaluations;
    };
    stage(c14, [&](std::size_t i) {
      return a141 * s.k1[i] + a147 * s.k7[i] + a148 * s.k8[i] + a149 * s.k9[i] +
             a1410 * s.k10[i] + a1411 * s.k11[i] + a1412 * s.k12[i] + a1413 * s.k13[i];
    }, s.k14);
    stage(c15, [&](std::size_t i) {
      return a151 * s.k1[i] + a156 * s.k6[i] + a157 * s.k7[i] + a158 * s.k8[i] +
             a1511 * s.k11[i] + a1512 * s.k12[i] + a1513 * s.k13[i] + a1514 * s.k14[i];
    }, s.k15);
    stage(c16, [&](std::size_t i) {
      return a161 * s.k1[i] + a166 * s.k6[i] + a167 * s.k7[i] + a168 * s.k8[i] +
             a169 * s.k9[i] + a1613 * s.k13[i] + a1614 * s.k14[i] + a1615 * s.k15[i];
    }, s.k16);
    for (std::size_t i = 0; i < n; ++i) {
      r_[4][i] = h * (r_[4][i] + d413 * s.k13[i] + d414 * s.k14[i] + d415 * s.k15[i] +
                      d416 * s.k16[i]);
      r_[5][i] = h * (r_[5][i] + d513 * s.k13[i] + d514 * s.k14[i] + d515 * s.k15[i] +
                      d516 * s.k16[i]);
      r_[6][i] = h * (r_[6][i] + d613 * s.k13[i] + d614 * s.k14[i] + d615 * s.k15[i] +
                      d616 * s.k16[i]);
      r_[7][i] = h * (r_[7][i] + d713 * s.k13[i] + d714 * s.k14[i] + d715 * s.k15[i] +
                      d716 * s.k16[i]);
    }
  }

  void evaluate(double t, std::span<double> out) const {
    const double s = (t - t0_) / h_;
    const double s1 = 1.0 - s;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double a6 = r_[6][i] + s * r_[7][i];
      const double a5 = r_[5][i] + a6 * s1;
      const double a4 = r_[4][i] + a5 * s;
      const double a3 = r_[3][i] + a4 * s1;
      const double a2 = r_[2][i] + a3 * s;
      const double a1 = r_[1][i] + a2 * s1;
      out[i] = r_[0][i] + s * a1;
    }
  }

 private:
  double t0_ = 0.0;
  double h_ = 1.0;
  std::array<std::vector<double>, 8> r_;
};

namespace detail {

// Starting step from the local Lipschitz estimate of Hairer's HINIT.
template <System F>
double initial_step(F& f, double t, std::span<const double> y, std::span<const double> f0,
                    double h_max, const StepControl& ctl, Stages& s, std::size_t& evaluations) {
  const std::size_t n = y.size();
  double dnf = 0.0;
  double dny = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = ctl.abs_tol + ctl.rel_tol * std::abs(y[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y[i] / sk) * (y[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, h_max);
  for (std::size_t i = 0; i < n; ++i) s.tmp[i] = y[i] + h * f0[i];
  f(t + h, std::span<const double>(s.tmp), std::span<double>(s.k2));
  ++evaluations;
  double der2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = ctl.abs_tol + ctl.rel_tol * std::abs(y[i]);
    der2 += ((s.k2[i] - f0[i]) / sk) * ((s.k2[i] - f0[i]) / sk);
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                   : std::pow(0.01 / der12, 1.0 / dop853::kDesignOrder);
  return std::min({100.0 * std::abs(h), h1, h_max});
}

}  // namespace detail

/// Adaptive integration of y' = f(t, y) from t0 to t1 (> t0). Every requested
/// sample time in [t0, t1] (ascending) is reported through
/// on_sample(t, y) from the dense output; samples never influence the step
/// sequence. On failure the outcome records the last good time and no further
/// samples are reported.
template <System F, class Observer>
Outcome integrate_adaptive(F&& f, double t0, double t1, std::vector<double> y,
                           std::span<const double> sample_times, const StepControl& ctl,
                           Observer&& on_sample) {
  using namespace dop853;
  const std::size_t n = y.size();
  detail::Stages s(n);
  DenseStep dense;
  Outcome out;
  out.t_reached = t0;

  std::size_t next_sample = 0;
  std::vector<double> y_sample(n);
  while (next_sample < sample_times.size() && sample_times[next_sample] <= t0) {
    on_sample(sample_times[next_sample], std::span<const double>(y));
    ++next_sample;
  }

  f(t0, std::span<const double>(y), std::span<double>(s.k1));
  out.evaluations = 1;
  if (!detail::all_finite(y) || !detail::all_finite(s.k1)) {
    out.status = Status::NonFinite;
    return out;
  }

  const double h_max = std::min(ctl.max_step, t1 - t0);
  double h = ctl.initial_step > 0.0
                 ? std::min(ctl.initial_step, h_max)
                 : detail::initial_step(f, t0, y, s.k1, h_max, ctl, s, out.evaluations);
  constexpr double safe = 0.9;
  constexpr double fac_shrink = 1.0 / 0.333;  // step can shrink by at most 3x
  constexpr double fac_grow = 1.0 / 6.0;      // and grow by at most 6x
  bool last_rejected = false;
  double t = t0;

  while (t < t1) {
    if (out.accepted + out.rejected >= ctl.max_steps) {
      out.status = Status::StepLimit;
      return out;
    }
    if (h < ctl.min_step || 0.1 * h <= std::abs(t) * 2.2e-16) {
      out.status = Status::StepUnderflow;
      return out;
    }
    const bool last = t + 1.01 * h >= t1;
    const double h_step = last ? t1 - t : h;

    detail::dop853_step(f, t, h_step, y, s);
    out.evaluations += 11;
    const double err = detail::dop853_error(h_step, y, s, ctl.rel_tol, ctl.abs_tol);
    if (!std::isfinite(err)) {
      // a non-finite stage can be a too-large step or a genuine blow-up; shrink first
      ++out.rejected;
      h = h_step / 10.0;
      last_rejected = true;
      if (!detail::all_finite(s.y_new) && h < ctl.min_step) {
        out.status = Status::NonFinite;
        return out;
      }
      continue;
    }

    const double fac11 = std::pow(err, 0.125);
    const double fac = std::max(fac_grow, std::min(fac_shrink, fac11 / safe));
    double h_new = h_step / fac;

    if (err <= 1.0) {
      ++out.accepted;
      f(t + h_step, std::span<const double>(s.y_new), std::span<double>(s.k13));
      ++out.evaluations;
      if (!detail::all_finite(s.y_new) || !detail::all_finite(s.k13)) {
        out.status = Status::NonFinite;
        return out;
      }
      const double t_new = last ? t1 : t + h_step;
      bool dense_ready = false;
      while (next_sample < sample_times.size() && sample_times[next_sample] <= t_new) {
        const double ts = sample_times[next_sample];
        if (ts == t_new) {
          on_sample(ts, std::span<const double>(s.y_new));
        } else {
          if (!dense_ready) {
            dense.build(f, t, h_step, y, s, out.evaluations);
            dense_ready = true;
          }
          dense.evaluate(ts, y_sample);
          on_sample(ts, std::span<const double>(y_sample));
        }
        ++next_sample;
      }
      std::swap(s.k1, s.k13);
      std::swap(y, s.y_new);
      t = t_new;
      out.t_reached = t;
      h_new = std::min(h_new, h_max);
      if (last_rejected) h_new = std::min(h_new, h_step);
      last_rejected = false;
      h = h_new;
    } else {
      h = h_step / std::min(fac_shrink, fac11 / safe);
      last_rejected = true;
      ++out.rejected;
    }
  }
  return out;
}

/// Fixed-step variant (n_steps equal steps) returning the final state; used for
/// convergence-order measurements.
template <System F>
std::vector<double> integrate_fixed(F&& f, double t0, double t1, std::vector<double> y,
                                    std::size_t n_steps) {
  detail::Stages s(y.size());
  const double h = (t1 - t0) / static_cast<double>(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    f(t, std::span<const double>(y), std::span<double>(s.k1));
    detail::dop853_step(f, t, h, y, s);
    std::swap(y, s.y_new);
  }
  return y;
}

}  // namespace trimer::ode
