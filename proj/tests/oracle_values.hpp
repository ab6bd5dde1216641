#pragma once

// Generated by tests/oracles/generate_oracles.py (mpmath, 40 digits). Do not edit.

namespace oracle {

inline constexpr double kExtExpTau03 = 3.9482220388574773825;
inline constexpr double kExtExpTau03Continued = 3.9482220388574773825;
inline constexpr double kMediumMargin = 0.039014430949437852416;
inline constexpr double kWeakMargin = 0.23420806136014257726;
inline constexpr double kWeakMarginRootBetaMax = 1.5592950824876532121;
inline constexpr double kWsMarginGamma095 = 1.3415459446920660687;
inline constexpr double kWsMarginGamma05 = -0.44859714810770287364;
inline constexpr double kWeak_p1 = -0.58156521496248003521;
inline constexpr double kWeak_p2 = 1.7119938349679478459;
inline constexpr double kWeak_p3 = 1.5270871878816805657;
inline constexpr double kWeak_t1 = -1.6878098504528049162;
inline constexpr double kWeak_t2 = -4.5139735791447362408;
inline constexpr double kWeak_t3 = -0.80034200987913346786;
inline constexpr double kWeak_q_star = 2.609895310248946569;
inline constexpr double kWeaklySingular_p1 = 0.22613992278437007481;
inline constexpr double kWeaklySingular_p2 = 11.023977057397843386;
inline constexpr double kWeaklySingular_p3 = 10.971849306950872734;
inline constexpr double kWeaklySingular_t1 = -0.59809572925918430437;
inline constexpr double kWeaklySingular_t2 = -1.7850246391626845082;
inline constexpr double kWeaklySingular_t3 = -0.053064535256468202735;
inline constexpr double kWeaklySingular_q_star = 3.552426061716726113;
inline constexpr double kMedium_p1 = -0.5;
inline constexpr double kMedium_p2 = 1.5685921639055505899;
inline constexpr double kMedium_p3 = 1.2226370047233903226;
inline constexpr double kMedium_t1 = -1.3862943611198906188;
inline constexpr double kMedium_t2 = -4.5139735791447362408;
inline constexpr double kMedium_t3 = -2.3547287284994191067;
inline constexpr double kMedium_q_star = 2.4519865200724977534;
inline constexpr double kInvSqrtL1 = 2.8284271247461900976;
inline constexpr double kInvSqrtGamma = 0.8284271247461900976;

}  // namespace oracle
