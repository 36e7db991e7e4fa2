#include "pemc/ed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pemc::ed {

namespace {

constexpr double kHorizonHours = 168.0;
constexpr std::array<double, 5> kMortalityK = {1.0, 0.9, 0.05, 0.02, 0.01};
constexpr std::array<double, 5> kMortalityA = {0.6, 0.1, 0.0, 0.0, 0.0};
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_triage(int triage) {
    if (triage < 1 || triage > 5) throw std::domain_error("triage level must be in 1..5");
}

}  // namespace

void EdConfig::validate() const {
    if (tau < 0) throw std::invalid_argument("EdConfig: tau must be >= 0");
    if (!(crisis_factor >= 1.0))
        throw std::invalid_argument("EdConfig: crisis_factor must be >= 1");
    for (int c : hosp1_shifts)
        if (c < 1) throw std::invalid_argument("EdConfig: hosp1 shift counts must be >= 1");
    for (int c : hosp2_shifts)
        if (c < 1) throw std::invalid_argument("EdConfig: hosp2 shift counts must be >= 1");
    arrivals1.validate();
    arrivals2.validate();
    if (arrivals1.hourly_rates.size() != 168 || arrivals2.hourly_rates.size() != 168)
        throw std::invalid_argument("EdConfig: arrival schedules must cover 168 hours");
    double total = 0.0;
    for (double p : triage_probs) {
        if (p < 0.0) throw std::invalid_argument("EdConfig: negative triage probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("EdConfig: triage probabilities must sum to 1 within 1e-9");
    for (double mu : service_rates)
        if (!(mu > 0.0)) throw std::invalid_argument("EdConfig: service rates must be > 0");
    if (!(travel_penalty >= 0.0) || !(ambulance_fraction >= 0.0) || ambulance_fraction > 1.0)
        throw std::invalid_argument("EdConfig: bad travel penalty or ambulance fraction");
    if (!(b_range[1] >= b_range[0]) || !(nu_range[1] >= nu_range[0]))
        throw std::invalid_argument("EdConfig: bad mortality shape ranges");
}

EdConfig EdConfig::from_theta(const ParameterPoint& theta) {
    EdConfig cfg;
    cfg.tau = theta.ed_tau;
    cfg.hosp2_shifts = theta.ed_hosp2_shifts;
    cfg.crisis_factor = theta.ed_crisis;
    cfg.arrivals1 = default_arrival_schedule();
    cfg.arrivals2 = default_arrival_schedule();
    cfg.validate();
    return cfg;
}

pemc::rng::RateSchedule default_arrival_schedule() {
    pemc::rng::RateSchedule sched;
    sched.hourly_rates.resize(168);
    for (std::size_t h = 0; h < 168; ++h) {
        const std::size_t hour_of_day = h % 24;
        double rate = 1.1;                       // evening
        if (hour_of_day < 8) rate = 0.8;         // night
        else if (hour_of_day < 20) rate = 1.6;   // day
        sched.hourly_rates[h] = rate;
    }
    return sched;
}

void save_arrival_csv(const pemc::rng::RateSchedule& h1, const pemc::rng::RateSchedule& h2,
                      const std::string& path) {
    if (h1.hourly_rates.size() != h2.hourly_rates.size())
        throw std::invalid_argument("save_arrival_csv: schedule length mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_arrival_csv: cannot open " + path);
    out << "hour,hospital1,hospital2\n";
    out.precision(17);
    for (std::size_t h = 0; h < h1.hourly_rates.size(); ++h)
        out << h << ',' << h1.hourly_rates[h] << ',' << h2.hourly_rates[h] << '\n';
}

std::pair<pemc::rng::RateSchedule, pemc::rng::RateSchedule> load_arrival_csv(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_arrival_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_arrival_csv: empty file");
    pemc::rng::RateSchedule h1, h2;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string hour, r1, r2;
        if (!std::getline(ss, hour, ',') || !std::getline(ss, r1, ',') ||
            !std::getline(ss, r2, ','))
            throw std::runtime_error("load_arrival_csv: malformed row in " + path);
        h1.hourly_rates.push_back(std::stod(r1));
        h2.hourly_rates.push_back(std::stod(r2));
    }
    h1.validate();
    h2.validate();
    return {h1, h2};
}

double mortality_prob(double x, int triage, double b, double nu) {
    check_triage(triage);
    if (!(x >= 0.0)) throw std::domain_error("mortality_prob: wait time must be >= 0");
    const double t = static_cast<double>(triage);
    const double k = kMortalityK[triage - 1];
    const double a = kMortalityA[triage - 1];
    const double base = 1.0 + 3.0 * t * std::exp(-(b + 5.0 - t) * x + 0.5 * t);
    return a + (k - a) / std::pow(base, 1.0 / (nu + 0.25 * t));
}

double inverse_mortality(double u, int triage, double b, double nu) {
    check_triage(triage);
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("inverse_mortality: u must be in (0,1)");
    const double t = static_cast<double>(triage);
    const double k = kMortalityK[triage - 1];
    const double a = kMortalityA[triage - 1];
    if (u >= k) return kInf;
    if (u <= mortality_prob(0.0, triage, b, nu)) return 0.0;
    // Solve u = a + (k-a) / (1 + 3t e^{-(B+5-t)x + 0.5t})^{1/(nu+0.25t)} for x.
    const double w = std::pow((k - a) / (u - a), nu + 0.25 * t) - 1.0;
    return (0.5 * t + std::log(3.0 * t) - std::log(w)) / (b + 5.0 - t);
}

namespace {

PatientDraw draw_patient(const EdConfig& cfg, double arrival_time, int origin,
                         pemc::rng::RngStream& stream) {
    PatientDraw p;
    p.arrival_time = arrival_time;
    p.origin_hospital = origin;
    p.ambulance = stream.uniform01() < cfg.ambulance_fraction;
    p.triage = static_cast<int>(stream.multinomial(cfg.triage_probs)) + 1;
    p.service_time = stream.exponential(cfg.service_rates[p.triage - 1]);
    p.b = stream.uniform(cfg.b_range[0], cfg.b_range[1]);
    p.nu = stream.uniform(cfg.nu_range[0], cfg.nu_range[1]);
    const double u = std::clamp(stream.uniform01(), 1e-16, 1.0 - 1e-16);
    p.death_time = inverse_mortality(u, p.triage, p.b, p.nu);
    return p;
}

pemc::rng::RateSchedule scaled(const pemc::rng::RateSchedule& base, double factor) {
    pemc::rng::RateSchedule out = base;
    for (double& r : out.hourly_rates) r *= factor;
    return out;
}

struct Event {
    double time;
    long seq;
    enum Type { kShift, kArrival, kCompletion, kDeath } type;
    long patient;
    int epoch;

    bool operator>(const Event& other) const {
        if (time != other.time) return time > other.time;
        return seq > other.seq;
    }
};

struct PatientState {
    int hospital = 0;
    double join_time = 0.0;
    double remaining = 0.0;
    double completion_time = 0.0;
    double service_start = 0.0;
    bool started = false;
    bool waiting = false;
    bool in_service = false;
    bool done = false;
    bool dead = false;
    bool was_diverted = false;
    int epoch = 0;
};

using QueueKey = std::tuple<int, double, long>;  // (triage, time key, id)

struct Hospital {
    std::set<QueueKey> waiting;                  // ordered best-first
    std::set<QueueKey> in_service;               // worst victim = *rbegin()
    const std::array<int, 6>* shift_counts = nullptr;

    std::size_t capacity(double t) const {
        const auto shift = static_cast<std::size_t>(t / kShiftHours + 1e-9) %
                           static_cast<std::size_t>(kShiftsPerDay);
        return static_cast<std::size_t>((*shift_counts)[shift]);
    }
};

}  // namespace

EdFeatureVector features_from_draws(const std::vector<PatientDraw>& patients) {
    EdFeatureVector f{};
    for (const auto& p : patients) {
        f[kTotalPatients] += 1.0;
        f[kTotalServiceTime] += p.service_time;
        f[kTriage1Count + static_cast<std::size_t>(p.triage - 1)] += 1.0;
        if (std::isinf(p.death_time)) {
            f[kNonLifeThreateningCount] += 1.0;
        } else {
            f[kTotalDeathTime] += p.death_time;
            auto& hosp_max = p.origin_hospital == 0 ? f[kH1MaxPatience] : f[kH2MaxPatience];
            hosp_max = std::max(hosp_max, p.death_time);
        }
    }
    f[kMaxPatienceTime] = std::max(f[kH1MaxPatience], f[kH2MaxPatience]);
    return f;
}

WeekResult simulate_week(const EdConfig& config, pemc::rng::RngStream& stream) {
    config.validate();
    WeekResult result;

    const auto times1 = pemc::rng::sample_nhpp(scaled(config.arrivals1, config.crisis_factor), stream);
    const auto times2 = pemc::rng::sample_nhpp(scaled(config.arrivals2, config.crisis_factor), stream);

    // Merge chronologically, then draw each patient's attributes in that
    // order so equal seeds give identical traces.
    std::vector<std::pair<double, int>> merged;
    merged.reserve(times1.size() + times2.size());
    for (double t : times1) merged.emplace_back(t, 0);
    for (double t : times2) merged.emplace_back(t, 1);
    std::sort(merged.begin(), merged.end());
    result.patients.reserve(merged.size());
    for (const auto& [t, origin] : merged)
        result.patients.push_back(draw_patient(config, t, origin, stream));

    result.arrivals = static_cast<int>(result.patients.size());
    result.features = features_from_draws(result.patients);
    for (const auto& p : result.patients) ++result.triage_counts[p.triage - 1];

    std::vector<PatientState> state(result.patients.size());
    Hospital hospitals[2];
    hospitals[0].shift_counts = &config.hosp1_shifts;
    hospitals[1].shift_counts = &config.hosp2_shifts;

    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    long seq = 0;
    for (double t = 0.0; t < kHorizonHours; t += kShiftHours)
        events.push({t, seq++, Event::kShift, -1, 0});
    for (long i = 0; i < static_cast<long>(result.patients.size()); ++i) {
        state[i].hospital = result.patients[i].origin_hospital;
        state[i].remaining = result.patients[i].service_time;
        events.push({result.patients[i].arrival_time, seq++, Event::kArrival, i, 0});
    }

    auto rebalance = [&](int h, double now) {
        Hospital& hosp = hospitals[h];
        const std::size_t cap = hosp.capacity(now);
        auto preempt_worst = [&] {
            const auto victim = *hosp.in_service.rbegin();
            const long id = std::get<2>(victim);
            hosp.in_service.erase(std::prev(hosp.in_service.end()));
            auto& ps = state[id];
            ps.in_service = false;
            ps.remaining = ps.completion_time - now;
            ++ps.epoch;
            ps.waiting = true;
            hosp.waiting.insert({result.patients[id].triage, ps.join_time, id});
        };
        while (hosp.in_service.size() > cap) preempt_worst();
        while (cap > 0 && hosp.in_service.size() == cap && !hosp.waiting.empty() &&
               std::get<0>(*hosp.waiting.begin()) < std::get<0>(*hosp.in_service.rbegin()))
            preempt_worst();
        while (hosp.in_service.size() < cap && !hosp.waiting.empty()) {
            const auto best = *hosp.waiting.begin();
            const long id = std::get<2>(best);
            hosp.waiting.erase(hosp.waiting.begin());
            auto& ps = state[id];
            ps.waiting = false;
            const auto& pd = result.patients[id];
            if (!ps.started && now - ps.join_time > pd.death_time) {
                // death events fire at the exact death time; this guard only
                // covers floating-point ties
                ps.dead = true;
                ++result.deaths;
                continue;
            }
            ps.started = true;
            ps.in_service = true;
            ++ps.epoch;
            ps.service_start = now;
            ps.completion_time = now + ps.remaining;
            hosp.in_service.insert({pd.triage, now, id});
            events.push({ps.completion_time, seq++, Event::kCompletion, id, ps.epoch});
        }
    };

    while (!events.empty() && events.top().time < kHorizonHours) {
        const Event ev = events.top();
        events.pop();
        switch (ev.type) {
            case Event::kShift:
                rebalance(0, ev.time);
                rebalance(1, ev.time);
                break;
            case Event::kArrival: {
                auto& ps = state[ev.patient];
                const auto& pd = result.patients[ev.patient];
                const int target = ps.hospital;
                if (pd.ambulance && !ps.was_diverted &&
                    hospitals[target].waiting.size() > static_cast<std::size_t>(config.tau)) {
                    ps.was_diverted = true;
                    ps.hospital = 1 - target;
                    ++result.diverted;
                    events.push({ev.time + config.travel_penalty, seq++, Event::kArrival,
                                 ev.patient, 0});
                    break;
                }
                ps.waiting = true;
                ps.join_time = ev.time;
                hospitals[target].waiting.insert({pd.triage, ev.time, ev.patient});
                if (!std::isinf(pd.death_time))
                    events.push({ev.time + pd.death_time, seq++, Event::kDeath, ev.patient, 0});
                rebalance(target, ev.time);
                break;
            }
            case Event::kCompletion: {
                auto& ps = state[ev.patient];
                if (!ps.in_service || ev.epoch != ps.epoch) break;  // stale after preemption
                ps.in_service = false;
                ps.done = true;
                ++result.served;
                const auto& pd = result.patients[ev.patient];
                hospitals[ps.hospital].in_service.erase(
                    {pd.triage, ps.service_start, ev.patient});
                rebalance(ps.hospital, ev.time);
                break;
            }
            case Event::kDeath: {
                auto& ps = state[ev.patient];
                if (!ps.waiting || ps.started) break;
                const auto& pd = result.patients[ev.patient];
                hospitals[ps.hospital].waiting.erase({pd.triage, ps.join_time, ev.patient});
                ps.waiting = false;
                ps.dead = true;
                ++result.deaths;
                break;
            }
        }
    }

    result.in_service_at_horizon = static_cast<int>(hospitals[0].in_service.size() +
                                                    hospitals[1].in_service.size());
    result.waiting_at_horizon =
        static_cast<int>(hospitals[0].waiting.size() + hospitals[1].waiting.size());
    return result;
}

std::vector<EdFeatureVector> sample_ed_feature_marginal(const EdConfig& config,
                                                        std::size_t count,
                                                        pemc::rng::RngStream& stream) {
    config.validate();
    const double mean1 = config.crisis_factor * config.arrivals1.integrated_rate();
    const double mean2 = config.crisis_factor * config.arrivals2.integrated_rate();
    std::vector<EdFeatureVector> out;
    out.reserve(count);
    std::vector<PatientDraw> scratch;
    for (std::size_t k = 0; k < count; ++k) {
        scratch.clear();
        const long long n1 = pemc::rng::poisson(mean1, stream);
        const long long n2 = pemc::rng::poisson(mean2, stream);
        for (long long i = 0; i < n1 + n2; ++i)
            scratch.push_back(draw_patient(config, 0.0, i < n1 ? 0 : 1, stream));
        out.push_back(features_from_draws(scratch));
    }
    return out;
}

}  // namespace pemc::ed
