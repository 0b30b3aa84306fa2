#include "xtalkprint/experiments.hpp"

#include <algorithm>
#include <stdexcept>

namespace xtalkprint {

char axis_char(Axis a) {
    switch (a) {
        case Axis::X: return 'x';
        case Axis::Y: return 'y';
        case Axis::Z: return 'z';
    }
    throw std::logic_error("bad axis");
}

Axis axis_from_char(char c) {
    switch (c) {
        case 'x': return Axis::X;
        case 'y': return Axis::Y;
        case 'z': return Axis::Z;
    }
    throw std::invalid_argument(std::string("bad axis char: ") + c);
}

std::string DriveSpec::label() const {
    switch (kind) {
        case DriveKind::Single: return "sgl" + std::to_string(a);
        case DriveKind::Pair: return "cx" + std::to_string(a) + "_" + std::to_string(b);
        case DriveKind::ControlSingle: return "ctl1";
        case DriveKind::ControlPair: return "ctl2";
    }
    throw std::logic_error("bad drive kind");
}

DriveSpec drive_from_label(const std::string& label) {
    DriveSpec d;
    if (label == "ctl1") {
        d.kind = DriveKind::ControlSingle;
    } else if (label == "ctl2") {
        d.kind = DriveKind::ControlPair;
    } else if (label.starts_with("sgl")) {
        d.kind = DriveKind::Single;
        d.a = std::stoi(label.substr(3));
    } else if (label.starts_with("cx")) {
        auto sep = label.find('_');
        if (sep == std::string::npos) throw std::invalid_argument("bad drive label: " + label);
        d.kind = DriveKind::Pair;
        d.a = std::stoi(label.substr(2, sep - 2));
        d.b = std::stoi(label.substr(sep + 1));
    } else {
        throw std::invalid_argument("bad drive label: " + label);
    }
    return d;
}

int IdtCircuitSpec::spectator_pos(int qubit) const {
    auto it = std::find(spectators.begin(), spectators.end(), qubit);
    if (it == spectators.end())
        throw std::invalid_argument("qubit " + std::to_string(qubit) + " is not a spectator of " +
                                    circuit_id);
    return static_cast<int>(it - spectators.begin());
}

std::vector<Coupling> IdtCircuitSpec::spectator_pairs(const DeviceTopology& device) const {
    std::vector<Coupling> pairs;
    for (auto c : device.couplings)
        if (!drive.drives(c.first) && !drive.drives(c.second)) pairs.push_back(c);
    return pairs;
}

std::vector<int> spectators_of(const DeviceTopology& device, const DriveSpec& drive) {
    std::vector<int> spect;
    for (int q = 0; q < device.num_qubits; ++q)
        if (!drive.drives(q)) spect.push_back(q);
    return spect;
}

std::vector<DriveSpec> enumerate_drives(const DeviceTopology& device) {
    std::vector<DriveSpec> drives;
    for (int q = 0; q < device.num_qubits; ++q)
        drives.push_back({DriveKind::Single, q, -1});
    for (auto [a, b] : device.couplings)
        drives.push_back({DriveKind::Pair, a, b});
    drives.push_back({DriveKind::ControlSingle, -1, -1});
    drives.push_back({DriveKind::ControlPair, -1, -1});
    return drives;
}

std::string make_circuit_id(const IdtCircuitSpec& spec) {
    // negative preparations use the uppercase axis letter
    std::string id = spec.device_id + "." + spec.drive.label() + ".p";
    for (const auto& p : spec.prep) {
        char c = axis_char(p.axis);
        id += p.sign > 0 ? c : static_cast<char>(c - 'a' + 'A');
    }
    id += ".m";
    for (Axis m : spec.meas) id += axis_char(m);
    id += ".s" + std::to_string(spec.idle_length);
    return id;
}

std::vector<IdtCircuitSpec> generate_experiments(const DeviceTopology& device,
                                                 const IdtConfig& config) {
    if (config.idle_lengths.empty())
        throw std::invalid_argument("idle length set must not be empty");
    auto lengths = config.idle_lengths;
    std::sort(lengths.begin(), lengths.end());

    const Axis axes[] = {Axis::X, Axis::Y, Axis::Z};
    std::vector<IdtCircuitSpec> out;
    for (const DriveSpec& drive : enumerate_drives(device)) {
        auto spect = spectators_of(device, drive);
        if (spect.empty()) continue;
        auto emit = [&](SignedAxis prep, Axis meas, int s) {
            IdtCircuitSpec spec;
            spec.device_id = device.device_id;
            spec.num_qubits = device.num_qubits;
            spec.drive = drive;
            spec.spectators = spect;
            spec.prep.assign(spect.size(), prep);
            spec.meas.assign(spect.size(), meas);
            spec.idle_length = s;
            spec.circuit_id = make_circuit_id(spec);
            out.push_back(std::move(spec));
        };
        for (int s : lengths) {
            for (Axis w : axes)
                for (Axis v : axes) emit({w, +1}, v, s);
            for (Axis w : axes) emit({w, -1}, w, s);
        }
    }
    return out;
}

}  // namespace xtalkprint
