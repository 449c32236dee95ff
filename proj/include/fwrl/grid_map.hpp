#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fwrl {

/// Movement direction. Doubles as the agent's action and a wind cell's push.
enum class Direction : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3 };
using Action = Direction;

inline constexpr std::size_t kNumActions = 4;

/// Fixed order used for deterministic tie-breaking.
inline constexpr std::array<Direction, kNumActions> kDirections = {
    Direction::Up, Direction::Down, Direction::Left, Direction::Right};

inline constexpr std::size_t index_of(Direction d) { return static_cast<std::size_t>(d); }
std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view s);

/// Cell position, origin at the top-left corner.
struct CellCoord {
    int x = 0;
    int y = 0;

    friend constexpr auto operator<=>(const CellCoord&, const CellCoord&) = default;
};

/// Index of a non-wall cell in row-major order. Valid range is [0, GridMap::num_states()).
using StateId = std::uint32_t;

enum class CellKind : std::uint8_t { Wall, Free, Wind };

struct Cell {
    CellKind kind = CellKind::Wall;
    Direction wind = Direction::Up;  // meaningful only for CellKind::Wind

    friend bool operator==(const Cell& a, const Cell& b) {
        return a.kind == b.kind && (a.kind != CellKind::Wind || a.wind == b.wind);
    }
};

class MapError : public std::runtime_error {
 public:
    enum class Kind { RaggedRows, UnknownChar, NoFreeCells, OpenBorder, TooSmall };

    MapError(Kind kind, int row, int col, const std::string& what)
        : std::runtime_error(what), kind_(kind), row_(row), col_(col) {}

    Kind kind() const { return kind_; }
    /// Zero-based location of the offending cell, or -1 when not applicable.
    int row() const { return row_; }
    int col() const { return col_; }

 private:
    Kind kind_;
    int row_;
    int col_;
};

/// Static grid world. Every non-wall cell (Free or Wind) is a state.
///
/// Invariants enforced at construction: width, height >= 3, wall border,
/// at least two non-wall cells.
class GridMap {
 public:
    GridMap(int width, int height, std::vector<Cell> cells, std::string name = {});

    int width() const { return width_; }
    int height() const { return height_; }
    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    bool in_bounds(CellCoord c) const {
        return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
    }
    const Cell& at(CellCoord c) const { return cells_[flat(c)]; }
    bool is_wall(CellCoord c) const { return !in_bounds(c) || at(c).kind == CellKind::Wall; }

    std::size_t num_states() const { return states_.size(); }
    CellCoord coord(StateId s) const { return states_[s]; }
    const std::vector<CellCoord>& states() const { return states_; }
    /// Empty for wall or out-of-bounds cells.
    std::optional<StateId> state_of(CellCoord c) const;
    /// Like state_of but throws std::out_of_range on walls.
    StateId require_state(CellCoord c) const;

    /// Geometry equality; the name is a label and does not participate.
    friend bool operator==(const GridMap& a, const GridMap& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.cells_ == b.cells_;
    }

 private:
    std::size_t flat(CellCoord c) const {
        return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(c.x);
    }

    int width_;
    int height_;
    std::vector<Cell> cells_;
    std::string name_;
    std::vector<CellCoord> states_;
    std::vector<std::int32_t> cell_to_state_;
};

/// Parses the ASCII map format: '#' wall, '.' free, '<' '>' '^' 'v' wind.
/// Throws MapError.
GridMap parse_map(std::string_view text, std::string name = {});
std::string serialize_map(const GridMap& map);

GridMap load_map_file(const std::filesystem::path& path);

std::vector<std::pair<std::string, GridMap>> bundled_maps();
/// Throws std::out_of_range for unknown names.
GridMap bundled_map(std::string_view name);
/// Bundled name if one matches, otherwise a map file path.
GridMap resolve_map(std::string_view name_or_path);

}  // namespace fwrl
