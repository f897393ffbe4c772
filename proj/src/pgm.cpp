#include "vsense/pgm.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "vsense/errors.hpp"

namespace vsense {

namespace {

// Next whitespace-delimited token, skipping '#' comments to end of line.
std::string next_token(std::istream& in, const std::filesystem::path& path) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF) throw IoError("truncated PGM header: " + path.string());
    while (c != EOF && !std::isspace(c) && c != '#') {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c == '#') in.putback('#');
    return tok;
}

int parse_header_int(std::istream& in, const std::filesystem::path& path, const char* name) {
    const std::string tok = next_token(in, path);
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError(std::string("bad PGM ") + name + " in " + path.string());
    }
}

}  // namespace

PgmImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P' || (m1 != '2' && m1 != '5'))
        throw IoError("unsupported magic number in " + path.string() + " (want P2 or P5)");
    const bool binary = (m1 == '5');

    PgmImage img;
    img.width = parse_header_int(in, path, "width");
    img.height = parse_header_int(in, path, "height");
    img.maxval = parse_header_int(in, path, "maxval");
    if (img.width <= 0 || img.height <= 0)
        throw IoError("bad PGM dimensions in " + path.string());
    if (img.maxval <= 0 || img.maxval > 65535)
        throw IoError("unsupported PGM maxval in " + path.string() + " (want 1..65535)");

    const std::size_t count =
        static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
    img.samples.resize(count);

    if (binary) {
        // The maxval token's single trailing whitespace byte has already
        // been consumed; the payload starts here.
        const int bytes_per = img.maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(count * bytes_per);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            throw IoError("truncated P5 payload in " + path.string());
        for (std::size_t i = 0; i < count; ++i) {
            img.samples[i] = bytes_per == 1
                                 ? raw[i]
                                 : static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            std::string tok;
            try {
                tok = next_token(in, path);
            } catch (const IoError&) {
                throw IoError("truncated P2 payload in " + path.string());
            }
            try {
                std::size_t used = 0;
                const int v = std::stoi(tok, &used);
                if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
                img.samples[i] = static_cast<std::uint16_t>(v);
            } catch (const std::exception&) {
                throw IoError("bad P2 sample in " + path.string());
            }
        }
    }
    for (auto s : img.samples)
        if (s > img.maxval) throw IoError("PGM sample exceeds maxval in " + path.string());
    return img;
}

void write_pgm8(const std::filesystem::path& path, int width, int height,
                const std::vector<std::uint8_t>& bytes) {
    if (width <= 0 || height <= 0 ||
        bytes.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw ConfigError("write_pgm8: size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace vsense
