/**
 * \file model_io.cpp
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 */

#include "jforge/model_io.hpp"

#include "jforge/dataio.hpp"
#include "jforge/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace jforge {

namespace {

void write_array(std::ostream &os, const double *values, std::size_t n) {
    char buf[64];
    for (std::size_t i = 0; i < n; ++i) {
        auto res = std::to_chars(buf, buf + sizeof buf, values[i], std::chars_format::general, 17);
        if (i)
            os << ' ';
        os.write(buf, res.ptr - buf);
    }
    os << '\n';
}

class LineReader {
public:
    explicit LineReader(std::istream &is) : is_(is) {}

    std::string next(const char *expecting) {
        std::string line;
        if (!std::getline(is_, line))
            throw ParseError("line " + std::to_string(line_no_ + 1) + ": unexpected end of file, expected " +
                             expecting);
        ++line_no_;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        return line;
    }

    bool at_end() {
        return is_.peek() == std::char_traits<char>::eof();
    }

    [[noreturn]] void fail(const std::string &what) const {
        throw ParseError("line " + std::to_string(line_no_) + ": " + what);
    }

    std::vector<double> doubles(std::size_t expected, const char *what) {
        const std::string line = next(what);
        std::vector<double> out;
        out.reserve(expected);
        const char *p = line.data();
        const char *end = p + line.size();
        while (p < end) {
            while (p < end && *p == ' ')
                ++p;
            if (p == end)
                break;
            double v;
            auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc())
                fail("bad number at offset " + std::to_string(p - line.data()) + " in " + what);
            out.push_back(v);
            p = res.ptr;
            if (p < end && *p != ' ')
                fail("bad number at offset " + std::to_string(p - line.data()) + " in " + what);
        }
        if (out.size() != expected)
            fail(std::string(what) + " has " + std::to_string(out.size()) + " values, expected " +
                 std::to_string(expected));
        return out;
    }

private:
    std::istream &is_;
    std::size_t line_no_ = 0;
};

std::vector<std::size_t> parse_sizes(LineReader &r, const std::string &text) {
    std::istringstream ss(text);
    std::vector<std::size_t> out;
    std::string tok;
    while (ss >> tok) {
        std::size_t v = 0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            r.fail("expected an integer, got '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace

void write_model(std::ostream &os, const Network &net) {
    os << model_magic << '\n';
    for (std::size_t i = 0; i < net.input_shape.size(); ++i)
        os << (i ? " " : "") << net.input_shape[i];
    os << '\n';
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        os << "LAYER " << k << ' ';
        const Layer &layer = net.layers[k];
        if (const auto *d = std::get_if<Dense>(&layer)) {
            os << "dense " << d->weights.rows() << ' ' << d->weights.cols() << '\n';
            const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = d->weights;
            write_array(os, w.data(), static_cast<std::size_t>(w.size()));
            write_array(os, d->bias.data(), static_cast<std::size_t>(d->bias.size()));
        } else if (const auto *c = std::get_if<Conv2D>(&layer)) {
            os << "conv2d " << c->count << ' ' << c->channels << ' ' << c->kernel_h << ' ' << c->kernel_w << ' '
               << c->stride << '\n';
            write_array(os, c->kernels.data(), c->kernels.size());
            write_array(os, c->bias.data(), c->bias.size());
        } else if (const auto *mp = std::get_if<MaxPool>(&layer)) {
            os << "maxpool " << mp->window << '\n';
        } else if (const auto *ap = std::get_if<AvgPool>(&layer)) {
            os << "avgpool " << ap->window << '\n';
        } else if (const auto *a = std::get_if<Activation>(&layer)) {
            os << "activation " << activation_name(a->kind) << '\n';
        } else if (std::holds_alternative<Flatten>(layer)) {
            os << "flatten\n";
        } else {
            os << "softmax\n";
        }
    }
}

Network read_model(std::istream &is) {
    LineReader r(is);
    if (r.at_end())
        throw ParseError("line 1: empty model file");
    const std::string magic = r.next("magic line");
    if (magic != model_magic)
        throw VersionError("unsupported model header '" + magic + "', expected '" + model_magic + "'");

    Network net;
    net.input_shape = parse_sizes(r, r.next("input shape"));
    if (net.input_shape.empty())
        r.fail("empty input shape");
    for (auto d : net.input_shape)
        if (d == 0)
            r.fail("input dimension must be positive");

    while (!r.at_end()) {
        std::istringstream header(r.next("layer header"));
        std::string tag, variant;
        std::size_t index = 0;
        if (!(header >> tag >> index >> variant) || tag != "LAYER")
            r.fail("expected 'LAYER <index> <variant>'");
        if (index != net.layers.size())
            r.fail("layer index " + std::to_string(index) + " out of sequence");
        std::string rest;
        std::getline(header, rest);
        if (variant == "activation") {
            std::istringstream ss(rest);
            std::string kind;
            ss >> kind;
            try {
                net.layers.emplace_back(Activation{parse_activation(kind)});
            } catch (const InputError &e) {
                r.fail(e.what());
            }
            continue;
        }
        if (variant == "flatten") {
            net.layers.emplace_back(Flatten{});
            continue;
        }
        if (variant == "softmax") {
            net.layers.emplace_back(Softmax{});
            continue;
        }
        const auto params = parse_sizes(r, rest);
        auto need = [&](std::size_t n) {
            if (params.size() != n)
                r.fail(variant + " expects " + std::to_string(n) + " header parameters");
            for (auto p : params)
                if (p == 0)
                    r.fail(variant + " header parameters must be positive");
        };
        if (variant == "dense") {
            need(2);
            const auto rows = static_cast<Eigen::Index>(params[0]);
            const auto cols = static_cast<Eigen::Index>(params[1]);
            const auto w = r.doubles(params[0] * params[1], "dense weights");
            const auto b = r.doubles(params[0], "dense bias");
            Dense d;
            d.weights = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                w.data(), rows, cols);
            d.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), rows);
            net.layers.emplace_back(std::move(d));
        } else if (variant == "conv2d") {
            need(5);
            Conv2D c;
            c.count = params[0];
            c.channels = params[1];
            c.kernel_h = params[2];
            c.kernel_w = params[3];
            c.stride = params[4];
            c.kernels = r.doubles(c.count * c.channels * c.kernel_h * c.kernel_w, "conv2d kernels");
            c.bias = r.doubles(c.count, "conv2d bias");
            net.layers.emplace_back(std::move(c));
        } else if (variant == "maxpool") {
            need(1);
            net.layers.emplace_back(MaxPool{params[0]});
        } else if (variant == "avgpool") {
            need(1);
            net.layers.emplace_back(AvgPool{params[0]});
        } else {
            r.fail("unknown layer variant '" + variant + "'");
        }
    }
    if (net.layers.empty())
        throw ParseError("model file has no layers");
    if (auto issues = validate(net); !issues.empty())
        throw ParseError("model file describes an invalid network: " + issues.front().message);
    return net;
}

void save_model(const Network &net, const std::string &path) {
    if (auto issues = validate(net); !issues.empty())
        throw DimensionError("refusing to save invalid network: " + issues.front().message);
    write_file_atomic(path, [&](std::ostream &os) { write_model(os, net); });
}

Network load_model(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open model file '" + path + "'");
    return read_model(in);
}

} // namespace jforge
