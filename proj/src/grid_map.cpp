#include "fwrl/grid_map.hpp"

#include <fstream>
#include <sstream>

namespace fwrl {

namespace {

constexpr std::string_view kFourRoom =
    "###########\n"
    "#....#....#\n"
    "#.........#\n"
    "#....#....#\n"
    "#....#....#\n"
    "##.###....#\n"
    "#....###.##\n"
    "#....#....#\n"
    "#.........#\n"
    "#....#....#\n"
    "###########\n";

// Same free-cell set as kFourRoom. An updraft column in the north-east room
// and an eastward gust in the south-west room.
constexpr std::string_view kWindyFourRoom =
    "###########\n"
    "#....#.^..#\n"
    "#......^..#\n"
    "#....#.^..#\n"
    "#....#.^..#\n"
    "##.###.^..#\n"
    "#....###.##\n"
    "#.>>.#....#\n"
    "#.>>......#\n"
    "#....#....#\n"
    "###########\n";

// Two vertical corridors joined by one horizontal corridor.
constexpr std::string_view kHMaze =
    "#########\n"
    "#.#####.#\n"
    "#.#####.#\n"
    "#.#####.#\n"
    "#.......#\n"
    "#.#####.#\n"
    "#.#####.#\n"
    "#.#####.#\n"
    "#########\n";

char glyph(const Cell& c) {
    switch (c.kind) {
        case CellKind::Wall:
            return '#';
        case CellKind::Free:
            return '.';
        case CellKind::Wind:
            switch (c.wind) {
                case Direction::Up:
                    return '^';
                case Direction::Down:
                    return 'v';
                case Direction::Left:
                    return '<';
                case Direction::Right:
                    return '>';
            }
    }
    return '?';
}

std::optional<Cell> cell_from_glyph(char ch) {
    switch (ch) {
        case '#':
            return Cell{CellKind::Wall, Direction::Up};
        case '.':
            return Cell{CellKind::Free, Direction::Up};
        case '^':
            return Cell{CellKind::Wind, Direction::Up};
        case 'v':
            return Cell{CellKind::Wind, Direction::Down};
        case '<':
            return Cell{CellKind::Wind, Direction::Left};
        case '>':
            return Cell{CellKind::Wind, Direction::Right};
        default:
            return std::nullopt;
    }
}

}  // namespace

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::Up:
            return "up";
        case Direction::Down:
            return "down";
        case Direction::Left:
            return "left";
        case Direction::Right:
            return "right";
    }
    return "?";
}

std::optional<Direction> parse_direction(std::string_view s) {
    for (Direction d : kDirections) {
        if (to_string(d) == s) return d;
    }
    return std::nullopt;
}

GridMap::GridMap(int width, int height, std::vector<Cell> cells, std::string name)
    : width_(width), height_(height), cells_(std::move(cells)), name_(std::move(name)) {
    if (width_ < 3 || height_ < 3) {
        throw MapError(MapError::Kind::TooSmall, -1, -1,
                       "map must be at least 3x3, got " + std::to_string(width_) + "x" +
                           std::to_string(height_));
    }
    if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
        throw std::invalid_argument("cell count does not match width*height");
    }
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            const bool border = x == 0 || y == 0 || x == width_ - 1 || y == height_ - 1;
            if (border && at({x, y}).kind != CellKind::Wall) {
                throw MapError(MapError::Kind::OpenBorder, y, x,
                               "border cell at row " + std::to_string(y) + ", col " +
                                   std::to_string(x) + " is not a wall");
            }
        }
    }
    cell_to_state_.assign(cells_.size(), -1);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            if (at({x, y}).kind != CellKind::Wall) {
                cell_to_state_[flat({x, y})] = static_cast<std::int32_t>(states_.size());
                states_.push_back({x, y});
            }
        }
    }
    if (states_.size() < 2) {
        throw MapError(MapError::Kind::NoFreeCells, -1, -1,
                       "map needs at least 2 non-wall cells, found " +
                           std::to_string(states_.size()));
    }
}

std::optional<StateId> GridMap::state_of(CellCoord c) const {
    if (!in_bounds(c)) return std::nullopt;
    const auto s = cell_to_state_[flat(c)];
    if (s < 0) return std::nullopt;
    return static_cast<StateId>(s);
}

StateId GridMap::require_state(CellCoord c) const {
    auto s = state_of(c);
    if (!s) {
        throw std::out_of_range("cell (" + std::to_string(c.x) + ", " + std::to_string(c.y) +
                                ") is not a free cell");
    }
    return *s;
}

GridMap parse_map(std::string_view text, std::string name) {
    std::vector<std::string_view> rows;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto row = text.substr(pos, end - pos);
        if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
        rows.push_back(row);
        pos = end + 1;
    }
    // A single trailing newline is allowed; blank lines elsewhere are ragged rows.
    while (!rows.empty() && rows.back().empty()) rows.pop_back();

    const int height = static_cast<int>(rows.size());
    const int width = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        if (static_cast<int>(rows[y].size()) != width) {
            throw MapError(MapError::Kind::RaggedRows, y, -1,
                           "row " + std::to_string(y) + " has length " +
                               std::to_string(rows[y].size()) + ", expected " +
                               std::to_string(width));
        }
        for (int x = 0; x < width; ++x) {
            auto cell = cell_from_glyph(rows[y][x]);
            if (!cell) {
                throw MapError(MapError::Kind::UnknownChar, y, x,
                               std::string("unknown map character '") + rows[y][x] +
                                   "' at row " + std::to_string(y) + ", col " +
                                   std::to_string(x));
            }
            cells.push_back(*cell);
        }
    }
    return GridMap(width, height, std::move(cells), std::move(name));
}

std::string serialize_map(const GridMap& map) {
    std::string out;
    out.reserve(static_cast<std::size_t>((map.width() + 1) * map.height()));
    for (int y = 0; y < map.height(); ++y) {
        if (y > 0) out.push_back('\n');
        for (int x = 0; x < map.width(); ++x) out.push_back(glyph(map.at({x, y})));
    }
    return out;
}

GridMap load_map_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open map file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_map(buf.str(), path.stem().string());
}

std::vector<std::pair<std::string, GridMap>> bundled_maps() {
    std::vector<std::pair<std::string, GridMap>> maps;
    maps.emplace_back("four_room", parse_map(kFourRoom, "four_room"));
    maps.emplace_back("windy_four_room", parse_map(kWindyFourRoom, "windy_four_room"));
    maps.emplace_back("h_maze", parse_map(kHMaze, "h_maze"));
    return maps;
}

GridMap bundled_map(std::string_view name) {
    for (auto& [n, m] : bundled_maps()) {
        if (n == name) return m;
    }
    throw std::out_of_range("no bundled map named '" + std::string(name) + "'");
}

GridMap resolve_map(std::string_view name_or_path) {
    for (auto& [n, m] : bundled_maps()) {
        if (n == name_or_path) return m;
    }
    return load_map_file(std::filesystem::path(name_or_path));
}

}  // namespace fwrl
