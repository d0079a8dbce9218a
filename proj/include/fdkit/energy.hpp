#pragma once

#include <string>

namespace fdk {

struct DeviceProfile {
    std::string name;
    double watts = 0.0;
};

inline const DeviceProfile kDesktopCpu{"Intel i9-7920X", 163.0};
inline const DeviceProfile kDesktopGpu{"Nvidia GTX 1080 Ti", 250.0};

struct EnergyConstants {
    double intensity_g_per_kwh = 275.0;
    double car_g_per_km = 122.0;
};

struct EnergyReport {
    double seconds = 0.0;
    double watts = 0.0;
    double multiplier = 1.0;
    double wh = 0.0;
    double co2e_g = 0.0;
    double car_km = 0.0;
};

// rated-power model: wh = seconds * watts * multiplier / 3600
EnergyReport energy(double seconds, const DeviceProfile& device, double multiplier = 1.0,
                    const EnergyConstants& k = {});

// co2 and car-km for an energy amount that was not spent
EnergyReport savings_report(double avoided_wh, const EnergyConstants& k = {});

}  // namespace fdk
