#include "fwrl/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fwrl {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s(buf);
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

std::string agent_color(AgentKind k) {
    switch (k) {
        case AgentKind::FWRL:
            return "#d62728";
        case AgentKind::QL:
            return "#1f77b4";
        case AgentKind::QLCAT:
            return "#2ca02c";
        case AgentKind::MBRL:
            return "#9467bd";
    }
    return "#000000";
}

std::string header(double w, double h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
           "\" viewBox=\"0 0 " + fmt(w) + " " + fmt(h) + "\" font-family=\"sans-serif\">\n" +
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "start",
                 int size = 12) {
    return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" + std::to_string(size) +
           "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
}

/// "Nice" tick spacing covering [lo, hi] with roughly `target` ticks.
double tick_step(double lo, double hi, int target) {
    const double span = std::max(hi - lo, 1e-9);
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

// Perceptually ordered ramp: dark blue -> teal -> yellow.
std::string ramp(double t) {
    t = std::clamp(t, 0.0, 1.0);
    static constexpr double stops[3][3] = {{68, 1, 84}, {33, 145, 140}, {253, 231, 37}};
    const double u = t * 2.0;
    const int i = std::min(1, static_cast<int>(u));
    const double f = u - i;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                  static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                  static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

}  // namespace

std::string render_reward_curves_svg(const std::vector<ResultRow>& rows, const std::string& title) {
    struct Stats {
        double sum = 0.0, lo = 0.0, hi = 0.0;
        int n = 0;
    };
    std::map<AgentKind, std::map<int, Stats>> series;
    for (const auto& r : rows) {
        auto& st = series[r.algo][r.episode];
        const double v = r.summary.total_reward;
        if (st.n == 0) {
            st.lo = st.hi = v;
        } else {
            st.lo = std::min(st.lo, v);
            st.hi = std::max(st.hi, v);
        }
        st.sum += v;
        ++st.n;
    }

    const double W = 720, H = 420, left = 70, right = 130, top = 40, bottom = 50;
    const double pw = W - left - right, ph = H - top - bottom;
    int max_ep = 1;
    double ymin = 0.0, ymax = 1.0;
    bool first = true;
    for (const auto& [k, eps] : series) {
        for (const auto& [ep, st] : eps) {
            max_ep = std::max(max_ep, ep);
            if (first) {
                ymin = st.lo;
                ymax = st.hi;
                first = false;
            }
            ymin = std::min(ymin, st.lo);
            ymax = std::max(ymax, st.hi);
        }
    }
    if (ymax - ymin < 1e-9) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    const double ystep = tick_step(ymin, ymax, 6);
    ymin = std::floor(ymin / ystep) * ystep;
    ymax = std::ceil(ymax / ystep) * ystep;
    auto px = [&](double ep) { return left + (max_ep == 1 ? 0.5 : (ep - 1) / (max_ep - 1)) * pw; };
    auto py = [&](double v) { return top + (ymax - v) / (ymax - ymin) * ph; };

    std::string svg = header(W, H);
    svg += text(W / 2, 24, title, "middle", 15);
    svg += "<g stroke=\"#333\" stroke-width=\"1\">\n";
    svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top + ph) + "\" x2=\"" + fmt(left + pw) +
           "\" y2=\"" + fmt(top + ph) + "\"/>\n";
    svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) + "\" y2=\"" +
           fmt(top + ph) + "\"/>\n</g>\n";
    for (double v = ymin; v <= ymax + 1e-9; v += ystep) {
        svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(py(v)) + "\" x2=\"" + fmt(left + pw) +
               "\" y2=\"" + fmt(py(v)) + "\" stroke=\"#e5e5e5\"/>\n";
        svg += text(left - 6, py(v) + 4, fmt(v), "end", 10);
    }
    const double xstep = std::max(1.0, tick_step(1, max_ep, 8));
    for (double e = 1; e <= max_ep + 1e-9; e += (e == 1 && xstep > 1 ? xstep - 1 : xstep)) {
        svg += text(px(e), top + ph + 16, std::to_string(static_cast<int>(e)), "middle", 10);
    }
    svg += text(left + pw / 2, H - 12, "episode", "middle", 12);
    svg += text(16, top + ph / 2, "reward", "middle", 12);

    int legend = 0;
    for (const auto& [kind, eps] : series) {
        const std::string color = agent_color(kind);
        std::string band = "<polygon fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
        for (const auto& [ep, st] : eps) band += fmt(px(ep)) + "," + fmt(py(st.hi)) + " ";
        for (auto it = eps.rbegin(); it != eps.rend(); ++it) {
            band += fmt(px(it->first)) + "," + fmt(py(it->second.lo)) + " ";
        }
        band.back() = '"';
        svg += band + "/>\n";
        std::string line = "<polyline class=\"series\" data-label=\"" + std::string(to_string(kind)) +
                           "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"";
        for (const auto& [ep, st] : eps) line += fmt(px(ep)) + "," + fmt(py(st.sum / st.n)) + " ";
        line.back() = '"';
        svg += line + "/>\n";
        const double ly = top + 10 + 20 * legend++;
        svg += "<rect x=\"" + fmt(left + pw + 16) + "\" y=\"" + fmt(ly - 9) +
               "\" width=\"14\" height=\"10\" fill=\"" + color + "\"/>\n";
        svg += text(left + pw + 36, ly, std::string(to_string(kind)));
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_dist_ineff_svg(const std::vector<AgentSummary>& agents, const std::string& title) {
    const double W = 520, H = 360, left = 60, top = 40, bottom = 50, right = 20;
    const double pw = W - left - right, ph = H - top - bottom;
    double ymax = 1.0;
    for (const auto& a : agents) {
        if (a.mean_dist_ineff) ymax = std::max(ymax, *a.mean_dist_ineff);
    }
    const double ystep = tick_step(0, ymax, 5);
    ymax = std::ceil(ymax / ystep) * ystep;
    auto py = [&](double v) { return top + (ymax - v) / ymax * ph; };

    std::string svg = header(W, H);
    svg += text(W / 2, 24, title, "middle", 15);
    for (double v = 0; v <= ymax + 1e-9; v += ystep) {
        svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(py(v)) + "\" x2=\"" + fmt(left + pw) +
               "\" y2=\"" + fmt(py(v)) + "\" stroke=\"#e5e5e5\"/>\n";
        svg += text(left - 6, py(v) + 4, fmt(v), "end", 10);
    }
    const double slot = pw / std::max<std::size_t>(1, agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const auto& a = agents[i];
        const double cx = left + slot * (i + 0.5);
        const std::string name(to_string(a.algo));
        if (a.mean_dist_ineff) {
            const double v = *a.mean_dist_ineff;
            svg += "<rect class=\"bar\" data-label=\"" + name + "\" x=\"" + fmt(cx - slot * 0.3) +
                   "\" y=\"" + fmt(py(v)) + "\" width=\"" + fmt(slot * 0.6) + "\" height=\"" +
                   fmt(py(0) - py(v)) + "\" fill=\"" + agent_color(a.algo) + "\"/>\n";
            svg += text(cx, py(v) - 4, fmt(v), "middle", 10);
        } else {
            svg += text(cx, py(0) - 4, "n/a", "middle", 10);
        }
        svg += text(cx, top + ph + 16, name, "middle", 12);
    }
    svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(py(0)) + "\" x2=\"" + fmt(left + pw) +
           "\" y2=\"" + fmt(py(0)) + "\" stroke=\"#333\"/>\n";
    svg += "</svg>\n";
    return svg;
}

std::string render_value_heatmap_svg(const GridMap& map, const std::vector<HeatmapRow>& rows) {
    const double cell = 22, gap = 24, label_w = 70, title_h = 22;
    std::size_t cols = 0;
    for (const auto& r : rows) cols = std::max(cols, r.panels.size());
    const double panel_w = cell * map.width(), panel_h = cell * map.height();
    const double W = label_w + cols * (panel_w + gap);
    const double H = rows.size() * (panel_h + gap + title_h) + 10;

    std::string svg = header(W, H);
    svg += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"8\" refY=\"5\" "
           "markerWidth=\"5\" markerHeight=\"5\" orient=\"auto-start-reverse\">"
           "<path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#ff7f0e\"/></marker></defs>\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double oy = 10 + r * (panel_h + gap + title_h);
        svg += text(8, oy + title_h + panel_h / 2, rows[r].label, "start", 13);
        for (std::size_t c = 0; c < rows[r].panels.size(); ++c) {
            const auto& p = rows[r].panels[c];
            const double ox = label_w + c * (panel_w + gap);
            const double gy = oy + title_h;
            svg += text(ox + panel_w / 2, oy + 14, p.title, "middle", 11);
            double lo = 0.0, hi = 0.0;
            bool any = false;
            for (double v : p.values) {
                if (!is_reachable(v)) continue;
                lo = any ? std::min(lo, v) : v;
                hi = any ? std::max(hi, v) : v;
                any = true;
            }
            svg += "<g class=\"panel\">\n";
            for (int y = 0; y < map.height(); ++y) {
                for (int x = 0; x < map.width(); ++x) {
                    std::string fill;
                    std::string cls = "cell";
                    if (auto s = map.state_of({x, y})) {
                        const double v = *s < p.values.size() ? p.values[*s] : kUnreachable;
                        fill = is_reachable(v) ? ramp(hi > lo ? (v - lo) / (hi - lo) : 1.0) : "#bdbdbd";
                    } else {
                        fill = "#000000";
                        cls = "wall";
                    }
                    svg += "<rect class=\"" + cls + "\" x=\"" + fmt(ox + x * cell) + "\" y=\"" +
                           fmt(gy + y * cell) + "\" width=\"" + fmt(cell) + "\" height=\"" +
                           fmt(cell) + "\" fill=\"" + fill + "\"/>\n";
                }
            }
            auto box = [&](CellCoord at, const char* color, const char* letter) {
                svg += "<rect x=\"" + fmt(ox + at.x * cell + 2) + "\" y=\"" + fmt(gy + at.y * cell + 2) +
                       "\" width=\"" + fmt(cell - 4) + "\" height=\"" + fmt(cell - 4) + "\" fill=\"" +
                       color + "\"/>\n";
                svg += "<text x=\"" + fmt(ox + (at.x + 0.5) * cell) + "\" y=\"" +
                       fmt(gy + (at.y + 0.5) * cell + 4) +
                       "\" font-size=\"11\" text-anchor=\"middle\" fill=\"white\">" + letter + "</text>\n";
            };
            if (p.start) box(*p.start, "#1f5fbf", "S");
            if (p.goal) box(*p.goal, "#2e9e3e", "G");
            // Consecutive distinct cells only; bumps do not draw.
            std::vector<CellCoord> path;
            for (auto cc : p.trajectory) {
                if (path.empty() || path.back() != cc) path.push_back(cc);
            }
            for (std::size_t i = 1; i < path.size(); ++i) {
                const auto a = path[i - 1], b = path[i];
                if (std::abs(a.x - b.x) + std::abs(a.y - b.y) != 1) continue;
                svg += "<line x1=\"" + fmt(ox + (a.x + 0.5) * cell) + "\" y1=\"" +
                       fmt(gy + (a.y + 0.5) * cell) + "\" x2=\"" + fmt(ox + (b.x + 0.5) * cell) +
                       "\" y2=\"" + fmt(gy + (b.y + 0.5) * cell) +
                       "\" stroke=\"#ff7f0e\" stroke-width=\"1.5\" marker-end=\"url(#arrow)\"/>\n";
            }
            svg += "</g>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

void emit_plots(const ResultsBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::string suffix = bundle.map_name.empty() ? "" : " (" + bundle.map_name + ")";
    {
        std::ofstream out(dir / "curves.svg", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (dir / "curves.svg").string());
        out << render_reward_curves_svg(bundle.rows, "Reward per episode" + suffix);
    }
    std::ofstream out(dir / "dist_ineff.svg", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "dist_ineff.svg").string());
    out << render_dist_ineff_svg(bundle.agents, "Distance inefficiency" + suffix);
}

}  // namespace fwrl
