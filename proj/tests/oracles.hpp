#pragma once

/// Frozen reference values for the distance formulas, computed independently
/// with 40-digit arbitrary-precision arithmetic and rounded to the nearest
/// double. Tests compare library output against these constants; none of them
/// were produced by the library itself.
namespace oracle {

inline constexpr double two_over_sqrt_pi = 1.1283791670955125739;
inline constexpr double sqrt2 = 1.4142135623730950488;

// taylor within-term pins: sqrt(2*var) * (3/4 - kurt/16)
inline constexpr double taylor_exx_var1_kurt0 = 1.0606601717798212866;
inline constexpr double taylor_exx_var1_kurt6 = 0.5303300858899106433;
inline constexpr double taylor_exx_var4_kurt1p2 = 1.9091883092036783159;

// taylor cross-term pins: sqrt(nu) * (3/4 - (c4 + 4*c3*dmu1 - 2*dmu2^2)/(8*nu^2))
inline constexpr double taylor_exy_n01_vs_n101 = 10.001460916949681772;  // nu=102
inline constexpr double taylor_exy_n01_vs_n11 = 1.3471506281091267839;   // nu=3
inline constexpr double taylor_exy_d2_n01_vs_n51 = 7.0863839060764370495; // nu=54

// exact normal cross-term pins: sqrt(vx+vy)*sqrt(2/pi)*exp(-delta^2)+dmu*erf(delta)
inline constexpr double gauss_exy_v1_v1_d0 = 1.1283791670955125739;
inline constexpr double gauss_exy_v1_v1_d1 = 1.3992824567484913318;
inline constexpr double gauss_exy_v1_v1_d10 = 10.000000000000296269;
inline constexpr double gauss_exy_vq_vq_d0 = 0.56418958354775628695; // v=0.25 each
inline constexpr double gauss_exy_v1_v4_d2 = 2.4537474206274246649;

// adjusted pins
inline constexpr double adjusted_exx_var1_kurt6 = 0.5980490812056019306;
inline constexpr double adjusted_exx_var1_kurtm1p5 = 1.2609616885679902347;
inline constexpr double adjusted_exy_exp1_vs_n11 = 0.86321412415055725225;

// residual diagnostic pins
inline constexpr double r3_gaussian_var1 = 0.37565047750535337234;
inline constexpr double r3_gaussian_var4 = 0.75130095501070674468;
inline constexpr double r3_exponential_rate1 = 3.3366601237240211308; // k6 = 120

// population coefficients from the closed normal forms
inline constexpr double h_gauss_n01_vs_n101 = 0.88716208329045208564;
inline constexpr double d2_gauss_n01_vs_n101 = 17.743241665809567389;
inline constexpr double h_taylor_n01_vs_n101 = 0.89394947592283256821;

// standard normal CDF, 15 points on [-8, 8]
inline constexpr double phi_table[15][2] = {
    {-8.0, 6.2209605742717841235e-16},
    {-4.0, 0.000031671241833119921254},
    {-3.0, 0.0013498980316300945267},
    {-2.0, 0.0227501319481792072},
    {-1.0, 0.15865525393145705141},
    {-0.5, 0.30853753872598689636},
    {-0.1, 0.46017216272297101853},
    {0.0, 0.5},
    {0.1, 0.53982783727702898147},
    {0.5, 0.69146246127401310364},
    {1.0, 0.84134474606854294859},
    {2.0, 0.9772498680518207928},
    {3.0, 0.99865010196836990547},
    {4.0, 0.99996832875816688008},
    {8.0, 0.9999999999999993779},
};

// textbook bernoulli shape values
inline constexpr double bern_p05_skew = 4.1294832096701117863;
inline constexpr double bern_p05_kurt = 15.052631578947368421;
inline constexpr double bern_p10_skew = 2.6666666666666666667;
inline constexpr double bern_p10_kurt = 5.1111111111111111111;
inline constexpr double bern_p30_skew = 0.87287156094396952506;
inline constexpr double bern_p30_kurt = -1.2380952380952380952;

// FNV-1a 64-bit digests of known byte strings
inline constexpr const char* fnv_empty = "cbf29ce484222325";
inline constexpr const char* fnv_a = "af63dc4c8601ec8c";
inline constexpr const char* fnv_hello = "a430d84680aabd0b";

} // namespace oracle
