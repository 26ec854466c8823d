#ifndef AA_CONFIG_HPP
#define AA_CONFIG_HPP

namespace aa {

/// How the window depth m_k is chosen at step k.
///   TruncateMinKM: m_k = min{k, m} (the algorithm statement; default).
///   FlushUntilM:   m_k = 0 for k < m and m afterwards (the variant used by
///                  the quasilinear damping experiment).
enum class HistoryPolicy {
    TruncateMinKM,
    FlushUntilM,
};

/// Damping factor selection.  Constant returns a fixed beta in (0,1];
/// Adaptive returns 1 - theta_k/2, which lies in [0.5, 1].
struct DampingSchedule {
    enum class Kind { Constant, Adaptive };

    Kind kind = Kind::Constant;
    double beta = 1.0; // used when kind == Constant

    static DampingSchedule constant(double beta) { return {Kind::Constant, beta}; }
    static DampingSchedule adaptive() { return {Kind::Adaptive, 1.0}; }
};

/// Damping factor for the current step given the gain theta_k in [0,1].
double beta_schedule(const DampingSchedule& schedule, double theta_k);

struct AndersonConfig {
    int depth_m = 0;
    DampingSchedule damping{};
    double residual_tol = 1e-10;
    int max_iters = 100;
    double divergence_guard = 1e10; // abort when ||w|| exceeds this
    HistoryPolicy history_policy = HistoryPolicy::TruncateMinKM;
    double rank_drop_tol = 1e-10;   // QR column rejection threshold

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
};

} // namespace aa

#endif // AA_CONFIG_HPP
