#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "nmr/gates.hpp"
#include "nmr/pulse.hpp"
#include "nmr/spin_system.hpp"

namespace nmr {

// Machine-language elements. Pulses store the physical phase actually
// emitted; FrameShift records a software-frame advance and produces no RF.
struct SeqPulse {
  int spin = 1;
  double angle_deg = 90.0;
  double phase_deg = 0.0;
  std::string shape = "rectangular";
  double duration_s = 0.0;
};

struct SeqDelay {
  double seconds = 0.0;
};

struct SeqFrameShift {
  int spin = 1;
  double degrees = 0.0;
};

using SequenceElement = std::variant<SeqPulse, SeqDelay, SeqFrameShift>;

class CompiledSequence {
 public:
  explicit CompiledSequence(int n);
  CompiledSequence() = default;

  int n() const { return n_; }
  const std::vector<SequenceElement>& elements() const { return elements_; }
  double frame_phase_deg(int spin) const;  // accumulated shift, reported mod 360
  double time_cursor_s() const { return time_cursor_s_; }

  // Appends a pulse with its phase expressed in the spin's logical frame;
  // the stored physical phase subtracts the accumulated frame.
  void pulse_logical(int spin, double angle_deg, double logical_phase_deg,
                     const std::string& shape = "rectangular", double duration_s = 0.0);
  void push(const SequenceElement& el);   // raw append, updates frames and time
  void append(const CompiledSequence& other);
  void clear_elements();                  // keeps n, resets frames and time

 private:
  int n_ = 0;
  std::vector<SequenceElement> elements_;
  std::vector<double> frame_phase_deg_;
  double time_cursor_s_ = 0.0;
};

// Sign pattern over equal time segments: pairs sharing a row keep their
// coupling active for the whole interval, distinct rows cancel exactly.
struct RefocusScheme {
  std::vector<double> segment_s;             // equal durations summing to T
  std::vector<std::vector<int>> sign_grid;   // [spin][segment], +1/-1
  // pulse_grid[b] = spins receiving a 180 at boundary b; boundary b sits
  // after segment b, with the final boundary restoring all signs to +1.
  std::vector<std::vector<int>> pulse_grid;

  // Net signed evolution time of pair (i,j), exact on the segment grid.
  double pair_balance_s(int i, int j) const;
};

struct ActivePair {
  int a = 1;
  int b = 2;
};

RefocusScheme synthesize_refocus(const SpinSystem& sys, std::optional<ActivePair> active,
                                 double total_time_s, const std::set<int>& known_z_spins = {});

struct CompileOptions {
  bool phase_exact = true;           // insert the Z-corrections making the gate exact up to global phase
  std::set<int> known_z_spins;       // spins promised diagonal: their mutual couplings may stay active
  double pw90_s = 0.0;               // pulse width bookkeeping for 90 degrees; scaled linearly with angle
  std::string shape90 = "rectangular";
  std::string shape180 = "rectangular";
};

CompiledSequence compile_gate(const Gate& g, const SpinSystem& sys,
                              const CompileOptions& opts = {});
CompiledSequence compile_circuit(const Circuit& c, const SpinSystem& sys,
                                 const CompileOptions& opts = {});

// Rewrites explicit Z pulses (shape "z") as FrameShift elements, re-expressing
// later pulse phases in the shifted frame. (The compiler already emits frames
// for rz gates; this pass normalizes hand-written sequences.) When
// diagonal_input is set, frame shifts are commuted to the start of the
// sequence and dropped there: exact for diagonal input states, where a
// leading z rotation has no effect.
CompiledSequence absorb_z(const CompiledSequence& seq, bool diagonal_input = false);

// Cancels adjacent inverse pulses on the same spin and merges contiguous
// frame shifts and delays; fixpoint, deterministic leftmost-first order.
CompiledSequence simplify(const CompiledSequence& seq);

// Inserts FrameShift(-theta) per spectator per shaped pulse, using the
// integrated Bloch-Siegert phase from the pulse library's shapes.
CompiledSequence insert_bs_corrections(const CompiledSequence& seq, const SpinSystem& sys);

// Exact ideal execution: pulses as instantaneous rotations at their stored
// physical phases, delays as coupling evolution, then the pending frame
// phases applied as trailing z rotations when apply_final_frames is set.
CMat sequence_unitary(const CompiledSequence& seq, const SpinSystem& sys,
                      bool apply_final_frames = true);

// Shaped-pulse execution: pulses with a nonzero duration run as slice-
// integrated propagators on their spin's own carrier with couplings active,
// so finite-bandwidth and Bloch-Siegert artefacts appear; zero-duration
// pulses stay instantaneous.
CMat pulse_mode_unitary(const CompiledSequence& seq, const SpinSystem& sys,
                        bool apply_final_frames = true);

enum class VerifyMode { exact, global_phase, diagonal_phase };

// Minimal spectral-norm distance ||U_seq - P*target|| over the phase class.
double verify(const CompiledSequence& seq, const CMat& target, const SpinSystem& sys,
              VerifyMode mode);
double unitary_distance(const CMat& u, const CMat& target, VerifyMode mode);

// Printable pulse-program listing with per-element timing and frame state.
std::string sequence_listing(const CompiledSequence& seq);

}  // namespace nmr
