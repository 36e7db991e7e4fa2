#pragma once

#include <array>
#include <string>
#include <vector>

#include "pemc/params.hpp"
#include "pemc/rng.hpp"

namespace pemc::ed {

inline constexpr int kShiftsPerDay = 6;
inline constexpr double kShiftHours = 4.0;
inline constexpr std::array<double, 5> kTriageProbs = {0.1098, 0.2761, 0.4596, 0.1297, 0.0248};

/// Two-hospital weekly ED scenario. Arrival schedules are baseline weekly
/// intensities (168 hourly rates each) scaled by crisis_factor at run time.
struct EdConfig {
    int tau = 20;                                       // diversion threshold
    std::array<int, 6> hosp1_shifts = {2, 2, 4, 2, 4, 1};  // doctors per 4h shift
    std::array<int, 6> hosp2_shifts = {2, 2, 4, 2, 4, 1};
    double crisis_factor = 1.0;
    pemc::rng::RateSchedule arrivals1;
    pemc::rng::RateSchedule arrivals2;
    std::array<double, 5> triage_probs = kTriageProbs;
    std::array<double, 5> service_rates = {1.0, 0.8, 0.6, 0.5, 0.4};  // per hour, by triage
    double travel_penalty = 0.5;   // hours added on diversion
    double ambulance_fraction = 0.25;
    std::array<double, 2> b_range = {2.5, 3.5};    // per-patient mortality shape B
    std::array<double, 2> nu_range = {1.5, 2.5};   // per-patient mortality shape nu

    void validate() const;

    /// Fills tau / hosp2 shifts / crisis from theta and uses the default
    /// arrival schedule for both hospitals.
    static EdConfig from_theta(const ParameterPoint& theta);
};

/// Built-in weekly arrival baseline (one hospital): day/night profile repeated
/// over 7 days, 168 hourly rates.
pemc::rng::RateSchedule default_arrival_schedule();

/// One rate per line ("hour,rate1,rate2" with a header); returns both columns.
std::pair<pemc::rng::RateSchedule, pemc::rng::RateSchedule> load_arrival_csv(
    const std::string& path);
void save_arrival_csv(const pemc::rng::RateSchedule& h1, const pemc::rng::RateSchedule& h2,
                      const std::string& path);

/// P(death | wait = x, triage = t) with per-patient shape (B, nu):
/// A[t] + (K[t]-A[t]) / (1 + 3t * exp(-(B+5-t)x + 0.5t))^(1/(nu+0.25t)).
double mortality_prob(double x, int triage, double b, double nu);

/// Inverse of mortality_prob in x: 0 below the left branch point, +infinity
/// for u >= K[t], else the exact interior inverse (round-trips to 1e-8).
double inverse_mortality(double u, int triage, double b, double nu);

/// Feature component order for the 12-dimensional X.
enum EdFeature : std::size_t {
    kH1MaxPatience = 0,
    kH2MaxPatience,
    kTotalPatients,
    kTotalServiceTime,
    kMaxPatienceTime,
    kTotalDeathTime,
    kNonLifeThreateningCount,
    kTriage1Count,
    kTriage2Count,
    kTriage3Count,
    kTriage4Count,
    kTriage5Count,
};
using EdFeatureVector = std::array<double, 12>;

/// Everything drawn for one patient at arrival time. The feature vector is a
/// deterministic function of these draws, which is what makes X coupled to
/// the event-loop outcome yet exactly samplable from its marginal law.
struct PatientDraw {
    double arrival_time = 0.0;
    int origin_hospital = 0;  // 0 or 1
    bool ambulance = false;
    int triage = 3;           // 1..5
    double service_time = 0.0;
    double b = 3.0;
    double nu = 2.0;
    double death_time = 0.0;  // patience; may be +infinity
};

struct WeekResult {
    int deaths = 0;
    EdFeatureVector features{};
    // trace summary
    int arrivals = 0;
    int served = 0;
    int in_service_at_horizon = 0;
    int waiting_at_horizon = 0;
    int diverted = 0;
    std::array<int, 5> triage_counts{};
    std::vector<PatientDraw> patients;  // full draw trace, in processing order
};

/// Runs the one-week discrete-event loop: NHPP arrivals at both hospitals,
/// preemptive-resume priority service by triage, shift-bound doctor counts,
/// threshold diversion of ambulances with a travel penalty, and death when a
/// patient's first wait for service exceeds their drawn death time.
WeekResult simulate_week(const EdConfig& config, pemc::rng::RngStream& stream);

EdFeatureVector features_from_draws(const std::vector<PatientDraw>& patients);

/// Samples X from its exact marginal law (Poisson counts + iid attribute
/// draws) without running the event loop.
std::vector<EdFeatureVector> sample_ed_feature_marginal(const EdConfig& config,
                                                        std::size_t count,
                                                        pemc::rng::RngStream& stream);

}  // namespace pemc::ed
