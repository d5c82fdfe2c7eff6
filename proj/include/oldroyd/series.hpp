#pragma once

// Time series of labeled norms, and the CSV interchange format:
// header exactly "t,<label1>,<label2>,..."; one row per output time;
// doubles printed with %.17g so round trips and byte-level determinism
// hold.

#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oldroyd {

struct NormSeries {
    std::vector<std::string> labels;
    std::vector<double> times;
    std::vector<std::vector<double>> rows;

    int column(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return static_cast<int>(i);
        return -1;
    }

    std::vector<double> col(const std::string& label) const {
        int c = column(label);
        if (c < 0) throw std::invalid_argument("NormSeries: no column named '" + label + "'");
        std::vector<double> v;
        v.reserve(rows.size());
        for (const auto& r : rows) v.push_back(r[static_cast<std::size_t>(c)]);
        return v;
    }

    void append(double t, std::vector<double> row) {
        if (row.size() != labels.size())
            throw std::invalid_argument("NormSeries: row width mismatch");
        if (!times.empty() && !(t > times.back()))
            throw std::invalid_argument("NormSeries: times must be strictly increasing");
        times.push_back(t);
        rows.push_back(std::move(row));
    }

    static std::string format_double(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    std::string to_csv() const {
        std::string out = "t";
        for (const auto& l : labels) {
            out += ',';
            out += l;
        }
        out += '\n';
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out += format_double(times[i]);
            for (double v : rows[i]) {
                out += ',';
                out += format_double(v);
            }
            out += '\n';
        }
        return out;
    }

    static NormSeries from_csv(std::istream& in) {
        NormSeries s;
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("NormSeries: empty CSV");
        std::stringstream hdr(line);
        std::string cell;
        bool first = true;
        while (std::getline(hdr, cell, ',')) {
            if (first) {
                if (cell != "t") throw std::runtime_error("NormSeries: header must start with 't'");
                first = false;
            } else {
                s.labels.push_back(cell);
            }
        }
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream row(line);
            std::vector<double> vals;
            while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
            if (vals.size() != s.labels.size() + 1)
                throw std::runtime_error("NormSeries: ragged CSV row");
            double t = vals.front();
            vals.erase(vals.begin());
            s.append(t, std::move(vals));
        }
        return s;
    }
};

} // namespace oldroyd
