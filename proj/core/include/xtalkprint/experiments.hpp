#pragma once

#include <string>
#include <vector>

#include "xtalkprint/topology.hpp"

namespace xtalkprint {

enum class Axis { X = 0, Y = 1, Z = 2 };

/// Pauli basis state +-x, +-y, +-z used for spectator preparation.
struct SignedAxis {
    Axis axis = Axis::Z;
    int sign = +1;

    bool operator==(const SignedAxis&) const = default;
};

char axis_char(Axis a);
Axis axis_from_char(char c);

enum class DriveKind { Single, Pair, ControlSingle, ControlPair };

/// What the drive qubits do while spectators idle: repeated H on one qubit,
/// repeated CNOT on a coupling, or nothing (control groups, which only set
/// the idle step duration).
struct DriveSpec {
    DriveKind kind = DriveKind::ControlSingle;
    int a = -1;  // single: drive qubit; pair: control (low index)
    int b = -1;  // pair: target (high index)

    bool drives(int q) const { return q == a || (kind == DriveKind::Pair && q == b); }
    bool is_control() const {
        return kind == DriveKind::ControlSingle || kind == DriveKind::ControlPair;
    }
    /// True for drives whose step lasts a two-qubit gate duration.
    bool two_qubit_duration() const {
        return kind == DriveKind::Pair || kind == DriveKind::ControlPair;
    }
    std::string label() const;

    bool operator==(const DriveSpec&) const = default;
};

DriveSpec drive_from_label(const std::string& label);

/// One idle-tomography circuit: prep/meas settings per spectator, a drive,
/// and an idle length (number of drive-gate repetitions).
struct IdtCircuitSpec {
    std::string device_id;
    int num_qubits = 0;
    DriveSpec drive;
    std::vector<int> spectators;      // ascending qubit indices
    std::vector<SignedAxis> prep;     // aligned with spectators
    std::vector<Axis> meas;           // aligned with spectators
    int idle_length = 1;
    std::string circuit_id;

    int spectator_pos(int qubit) const;
    /// Couplings of the device with both endpoints idle in this circuit.
    std::vector<Coupling> spectator_pairs(const DeviceTopology& device) const;
};

struct IdtConfig {
    std::vector<int> idle_lengths{1, 2, 4, 8};
};

std::vector<int> spectators_of(const DeviceTopology& device, const DriveSpec& drive);
std::vector<DriveSpec> enumerate_drives(const DeviceTopology& device);

std::string make_circuit_id(const IdtCircuitSpec& spec);

/// The full enrollment suite for one device: for every drive (singles by
/// qubit, pairs by coupling in canonical direction, two control groups),
/// every idle length, all nine uniform (+w prep, v meas) spectator settings
/// plus the three negative preparations (-w prep, w meas).
std::vector<IdtCircuitSpec> generate_experiments(const DeviceTopology& device,
                                                 const IdtConfig& config);

}  // namespace xtalkprint
