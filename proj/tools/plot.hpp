#pragma once

// Minimal static SVG 1.1 line/scatter plots built from CSV tables.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace plot {

struct Table {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::runtime_error("no column '" + name + "'");
    }
    std::vector<double> values(const std::string& name) const {
        const std::size_t c = column(name);
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(r[c]);
        return v;
    }
};

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

inline Table parse_csv(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line.substr(1));
            continue;
        }
        if (t.header.empty()) {
            t.header = split(line, ',');
            continue;
        }
        std::vector<double> row;
        for (const auto& f : split(line, ',')) row.push_back(std::strtod(f.c_str(), nullptr));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str());
}

struct Series {
    std::string label;
    std::vector<double> x, y;
    bool points = false;
};

struct Figure {
    std::string title, xlabel, ylabel, note;
    bool log_y = false;
    std::vector<Series> series;
};

inline std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

inline std::string render(const Figure& fig) {
    const double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto ty = [&](double y) { return fig.log_y ? std::log10(y) : y; };
    for (const auto& s : fig.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (fig.log_y && !(s.y[i] > 0)) continue;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!(x1 > x0)) x0 -= 1, x1 += 1;
    if (!(y1 > y0)) y0 -= 1, y1 += 1;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H << "\">\n";
    if (!fig.note.empty()) o << "<desc>" << escape(fig.note) << "</desc>\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << L << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << escape(fig.title) << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        const double X = L + (W - L - R) * k / 4.0, Y = H - B - (H - T - B) * k / 4.0;
        char bx[32], by[32];
        std::snprintf(bx, sizeof bx, "%.3g", xv);
        std::snprintf(by, sizeof by, fig.log_y ? "1e%.2g" : "%.3g", yv);
        o << "<line x1=\"" << X << "\" y1=\"" << H - B << "\" x2=\"" << X << "\" y2=\"" << H - B + 5 << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << X << "\" y=\"" << H - B + 18 << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
          << bx << "</text>\n";
        o << "<line x1=\"" << L - 5 << "\" y1=\"" << Y << "\" x2=\"" << L << "\" y2=\"" << Y << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << L - 8 << "\" y=\"" << Y + 3 << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
          << by << "</text>\n";
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
      << escape(fig.xlabel) << "</text>\n";
    o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (T + H - B) / 2 << ")\">" << escape(fig.ylabel) << "</text>\n";
    for (std::size_t k = 0; k < fig.series.size(); ++k) {
        const Series& s = fig.series[k];
        const char* col = colors[k % 6];
        std::ostringstream pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (fig.log_y && !(s.y[i] > 0)) continue;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (s.points)
                o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"2.5\" fill=\"" << col << "\"/>\n";
            else
                pts << px(s.x[i]) << "," << py(s.y[i]) << " ";
        }
        if (!s.points) o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
        const double ly = T + 14 + 16 * static_cast<double>(k);
        o << "<rect x=\"" << W - R + 10 << "\" y=\"" << ly - 8 << "\" width=\"10\" height=\"10\" fill=\"" << col << "\"/>\n";
        o << "<text x=\"" << W - R + 25 << "\" y=\"" << ly + 1 << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

// One figure from named columns of a CSV table; the comment lines become the SVG description.
inline Figure from_table(const Table& t, const std::string& x, const std::vector<std::string>& ys, const std::string& title,
                         bool log_y = false, bool negate = false) {
    Figure f;
    f.title = title;
    f.xlabel = x;
    f.ylabel = ys.size() == 1 ? ys[0] : "value";
    f.log_y = log_y;
    for (const auto& c : t.comments) f.note += c;
    for (const auto& y : ys) {
        Series s;
        s.label = negate ? "-" + y : y;
        s.x = t.values(x);
        s.y = t.values(y);
        if (negate)
            for (double& v : s.y) v = -v;
        f.series.push_back(std::move(s));
    }
    return f;
}

} // namespace plot
