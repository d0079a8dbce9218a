#include "fdkit/energy.hpp"

#include "fdkit/error.hpp"

namespace fdk {

namespace {

void fill_emissions(EnergyReport& r, const EnergyConstants& k) {
    if (k.intensity_g_per_kwh < 0 || k.car_g_per_km <= 0) throw ValidationError("invalid energy constants");
    r.co2e_g = r.wh * k.intensity_g_per_kwh / 1000.0;
    r.car_km = r.co2e_g / k.car_g_per_km;
}

}  // namespace

EnergyReport energy(double seconds, const DeviceProfile& device, double multiplier, const EnergyConstants& k) {
    if (seconds < 0) throw ValidationError("negative runtime");
    if (device.watts <= 0) throw ValidationError("device " + device.name + " needs positive watts");
    if (multiplier < 1) throw ValidationError("multiplier must be at least 1");
    EnergyReport r;
    r.seconds = seconds;
    r.watts = device.watts;
    r.multiplier = multiplier;
    r.wh = seconds * device.watts * multiplier / 3600.0;
    fill_emissions(r, k);
    return r;
}

EnergyReport savings_report(double avoided_wh, const EnergyConstants& k) {
    if (avoided_wh < 0) throw ValidationError("negative avoided energy");
    EnergyReport r;
    r.wh = avoided_wh;
    fill_emissions(r, k);
    return r;
}

}  // namespace fdk
