// Writes synthetic stand-ins for the TON-IoT activity files and the AQ&U
// air quality export. Same column layout as the public files, roughly
// plausible values, about 25% more rows than the replay needs, and a
// sprinkling of broken cells.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace {

using Rng = std::mt19937_64;

double normal(Rng& rng, double mean, double sd) { return std::normal_distribution<double>(mean, sd)(rng); }
double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

// Broken cells look like the ones in the real exports: blank or "nan".
std::string maybe_broken(Rng& rng, std::string cell) {
    if (chance(rng, 0.004)) return chance(rng, 0.5) ? "" : "nan";
    return cell;
}

std::string ton_date(long ts) {
    static const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                   "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    const long day = ts / 86400;
    const long sec = ts % 86400;
    // 2019-04-25 is day 18011 since 1970; good enough for a month or two.
    const long d = day - 18011;
    const int month = d < 6 ? 3 : 4;
    const int dom = d < 6 ? 25 + static_cast<int>(d) : static_cast<int>(d) - 5;
    return fmt::format("{:02}-{}-19,{:2}:{:02}:{:02}", dom, months[month], sec / 3600, sec / 60 % 60,
                       sec % 60);
}

struct TonFile {
    std::string file;
    std::vector<std::string> features;
    std::function<std::vector<std::string>(Rng&, long row)> row;
};

void write_ton(const std::filesystem::path& dir, const TonFile& f, std::size_t rows, Rng& rng) {
    std::ofstream out(dir / f.file);
    out << "ts,date,time";
    for (const auto& c : f.features) out << ',' << c;
    out << ",label,type\n";
    long ts = 1556245180;
    for (std::size_t i = 0; i < rows; ++i) {
        ts += 1 + static_cast<long>(uniform(rng, 0, 9));
        const bool attack = chance(rng, 0.08);
        out << ts << ',' << ton_date(ts);
        for (const auto& c : f.row(rng, static_cast<long>(i))) out << ',' << c;
        out << ',' << (attack ? 1 : 0) << ',' << (attack ? "ddos" : "normal") << '\n';
    }
}

void write_aqu(const std::filesystem::path& dir, std::size_t rows, Rng& rng) {
    std::ofstream out(dir / "aqu_airquality.csv");
    out << "ID,timestamp,Latitude,Longitude,pm1,pm2_5,pm10,co,no2,o3,temperature\n";
    struct Site {
        std::string id;
        double lat, lon;
    };
    std::vector<Site> sites;
    for (int s = 0; s < 24; ++s) {
        sites.push_back({fmt::format("S-A-{:03}", s + 1), 40.70 + uniform(rng, 0, 0.15), -111.97 + uniform(rng, 0, 0.15)});
    }
    long minute = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        const Site& site = sites[static_cast<std::size_t>(uniform(rng, 0, sites.size()))];
        minute += static_cast<long>(uniform(rng, 0, 3));
        // Winter inversion days push everything up; PM is reported in whole ug/m3.
        const bool inversion = minute / 1440 % 5 == 0;
        const double base = std::max(0.0, normal(rng, 7.0, 2.5) + (inversion ? 5.0 : 0.0));
        const int pm1 = static_cast<int>(std::lround(base * 0.7));
        const int pm25 = static_cast<int>(std::lround(base));
        const int pm10 = static_cast<int>(std::lround(base * 1.3 + uniform(rng, 0, 2)));
        const double co = std::max(0.05, normal(rng, inversion ? 0.9 : 0.4, 0.15));
        const double no2 = std::max(1.0, normal(rng, inversion ? 32.0 : 18.0, 5.0));
        const double o3 = std::max(1.0, normal(rng, inversion ? 22.0 : 35.0, 6.0));
        const double temp_f = normal(rng, 38.0, 6.0);
        out << site.id << ','
            << fmt::format("2018-01-{:02}T{:02}:{:02}:00Z", 1 + minute / 1440 % 28, minute / 60 % 24, minute % 60)
            << ',' << fmt::format("{:.5f},{:.5f}", site.lat, site.lon) << ','
            << maybe_broken(rng, std::to_string(pm1)) << ',' << maybe_broken(rng, std::to_string(pm25)) << ','
            << maybe_broken(rng, std::to_string(pm10)) << ',' << maybe_broken(rng, fmt::format("{:.2f}", co)) << ','
            << maybe_broken(rng, fmt::format("{:.1f}", no2)) << ',' << maybe_broken(rng, fmt::format("{:.1f}", o3))
            << ',' << fmt::format("{:.1f}", temp_f) << '\n';
    }
}

std::size_t with_margin(std::size_t used) { return used + used / 4; }

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "fixtures/datasets";
    std::filesystem::create_directories(dir);
    Rng rng(20240601);

    const std::vector<std::pair<TonFile, std::size_t>> ton{
        {{"ton_iot_fridge.csv",
          {"fridge_temperature", "temp_condition"},
          [](Rng& r, long) {
              const double t = normal(r, 7.0, 3.2);
              return std::vector<std::string>{maybe_broken(r, fmt::format("{:.2f}", t)),
                                              t > 9 ? "high" : "low"};
          }},
         1000},
        {{"ton_iot_garage_door.csv",
          {"door_state", "sphone_signal"},
          [](Rng& r, long) {
              return std::vector<std::string>{chance(r, 0.3) ? "open" : "closed",
                                              maybe_broken(r, chance(r, 0.5) ? "true" : "false")};
          }},
         800},
        {{"ton_iot_gps_tracker.csv",
          {"latitude", "longitude"},
          [](Rng& r, long i) {
              const double drift = 0.0003 * std::sin(static_cast<double>(i) / 40.0);
              return std::vector<std::string>{maybe_broken(r, fmt::format("{:.6f}", 116.52 + drift + normal(r, 0, 0.02))),
                                              maybe_broken(r, fmt::format("{:.6f}", 132.09 - drift + normal(r, 0, 0.02)))};
          }},
         2200},
        {{"ton_iot_modbus.csv",
          {"FC1_Read_Input_Register", "FC2_Read_Discrete_Value", "FC3_Read_Holding_Register",
           "FC4_Read_Coil"},
          [](Rng& r, long) {
              std::vector<std::string> v;
              for (int k = 0; k < 4; ++k) {
                  v.push_back(maybe_broken(r, std::to_string(static_cast<int>(uniform(r, 30000, 65535)))));
              }
              return v;
          }},
         2000},
        {{"ton_iot_motion_light.csv",
          {"motion_status", "light_status"},
          [](Rng& r, long) {
              const bool motion = chance(r, 0.35);
              return std::vector<std::string>{maybe_broken(r, motion ? "1" : "0"),
                                              motion || chance(r, 0.2) ? "on" : "off"};
          }},
         1000},
        {{"ton_iot_thermostat.csv",
          {"current_temperature", "thermostat_status"},
          [](Rng& r, long) {
              const double t = normal(r, 22.0, 3.5);
              return std::vector<std::string>{maybe_broken(r, fmt::format("{:.4f}", t)),
                                              maybe_broken(r, t < 21 ? "1" : "0")};
          }},
         1000},
    };
    for (const auto& [file, used] : ton) write_ton(dir, file, with_margin(used), rng);
    write_aqu(dir, with_margin(2000), rng);
    std::printf("wrote datasets to %s\n", dir.string().c_str());
    return 0;
}
