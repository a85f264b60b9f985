#ifndef PGP_PROGRAM_H
#define PGP_PROGRAM_H

#include "strips.h"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pgp {
constexpr int kMaxArgs = 6;
constexpr int kMaxPointers = 12;

class ProgramError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OpCode : std::uint8_t { Undefined, Action, Inc, Dec, Clear, Set, Test, Goto, End };

/*
  One program line. `id` is the schema (Action) or predicate (Test);
  `args` hold pointer ids. Goto jumps to `target` when the zero flag
  equals !negated.
*/
struct Instruction {
    OpCode op = OpCode::Undefined;
    std::int16_t id = -1;
    std::uint8_t arity = 0;
    bool negated = false;
    std::int16_t target = -1;
    std::array<std::uint8_t, kMaxArgs> args{};

    static Instruction action(int schema, std::span<const int> pointers);
    static Instruction test(int predicate, std::span<const int> pointers);
    static Instruction inc(int z);
    static Instruction dec(int z);
    static Instruction clear(int z);
    static Instruction set(int z1, int z2);
    static Instruction go(int target, bool negated);
    static Instruction end();

    bool defined() const { return op != OpCode::Undefined; }
    std::span<const std::uint8_t> pointer_args() const { return {args.data(), arity}; }

    friend bool operator==(const Instruction &, const Instruction &) = default;
};

struct Pointer {
    std::string name;
    TypeId type = 0;
};

struct PointerSet {
    std::vector<Pointer> pointers;

    std::size_t size() const { return pointers.size(); }
    std::optional<int> find(std::string_view name) const;
    // "z1:location z2:location"
    std::string str(const DomainModel &domain) const;
};

// Builds pointers from per-type counts, named z-<type><k> (or z<k> when
// there is a single type).
std::shared_ptr<const PointerSet> make_pointers(
    const DomainModel &domain, std::span<const std::pair<TypeId, int>> counts);

/*
  Fixed-length planning program. The last line is always End and only
  Undefined lines can be programmed.
*/
class Program {
public:
    Program(int num_lines, std::shared_ptr<const PointerSet> pointers);
    Program(std::vector<Instruction> lines, std::shared_ptr<const PointerSet> pointers);

    int size() const { return static_cast<int>(lines_.size()); }
    std::span<const Instruction> lines() const { return lines_; }
    const Instruction &operator[](int i) const { return lines_[i]; }
    const PointerSet &pointers() const { return *pointers_; }
    const std::shared_ptr<const PointerSet> &pointers_ptr() const { return pointers_; }

    // First Undefined line, or -1 when the program is complete.
    int first_undefined() const;
    int num_defined() const;
    // Throws ProgramError when the line is already programmed or is the last line.
    void set_line(int line, const Instruction &instruction);

    friend bool operator==(const Program &a, const Program &b) { return a.lines_ == b.lines_; }

private:
    std::vector<Instruction> lines_;
    std::shared_ptr<const PointerSet> pointers_;
};

// Throws ProgramError when an instruction is ill-typed or badly targeted.
void check_instruction(const DomainModel &domain, const PointerSet &pointers,
                       const Instruction &instruction, int line, int num_lines);
void check_program(const DomainModel &domain, const Program &program);

std::string format_instruction(const DomainModel &domain, const PointerSet &pointers,
                               const Instruction &instruction);
std::string format_program(const DomainModel &domain, const Program &program);

/*
  Parses "k. instr" lines. A leading "pointers: z1:type ..." line declares
  the pointers; otherwise `pointers` must be supplied.
*/
Program parse_program(std::string_view text, const DomainModel &domain,
                      std::shared_ptr<const PointerSet> pointers = nullptr);
}

#endif
