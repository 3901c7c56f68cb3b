#include "minangle/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace minangle {

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

std::string lower_extension(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

// Next non-empty line with comments stripped ('#' for both formats).
bool next_content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
}

int parse_index(const std::string& token, const std::string& origin, size_t line_no) {
    // OBJ facet tokens may carry /texture/normal references.
    std::string head = token.substr(0, token.find('/'));
    try {
        size_t used = 0;
        int value = std::stoi(head, &used);
        if (used != head.size()) throw std::invalid_argument(head);
        return value;
    } catch (const std::exception&) {
        throw IoError(origin + ": bad vertex index '" + token + "' on line " +
                      std::to_string(line_no));
    }
}

}  // namespace

MeshBuffers parse_off(std::istream& in, const std::string& origin) {
    std::string line;
    if (!next_content_line(in, line)) throw IoError(origin + ": empty file");
    {
        std::istringstream ss(line);
        std::string magic;
        ss >> magic;
        if (magic != "OFF") throw IoError(origin + ": missing OFF header");
        // Counts may share the header line or follow on their own.
        size_t rest = line.find("OFF") + 3;
        if (line.find_first_not_of(" \t\r", rest) == std::string::npos) {
            if (!next_content_line(in, line)) throw IoError(origin + ": missing element counts");
        } else {
            line = line.substr(rest);
        }
    }
    long nv = 0, nf = 0, ne = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> nv >> nf >> ne) || nv < 0 || nf < 0)
            throw IoError(origin + ": malformed element counts '" + line + "'");
    }

    MeshBuffers buffers;
    buffers.positions.reserve(static_cast<size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        if (!next_content_line(in, line))
            throw IoError(origin + ": expected " + std::to_string(nv) + " vertices, found " +
                          std::to_string(i));
        std::istringstream ss(line);
        Vec3 p;
        if (!(ss >> p.x >> p.y >> p.z))
            throw IoError(origin + ": malformed vertex at index " + std::to_string(i));
        buffers.positions.push_back(p);
    }
    buffers.triangles.reserve(static_cast<size_t>(nf));
    for (long i = 0; i < nf; ++i) {
        if (!next_content_line(in, line))
            throw IoError(origin + ": expected " + std::to_string(nf) + " facets, found " +
                          std::to_string(i));
        std::istringstream ss(line);
        long count = 0;
        if (!(ss >> count)) throw IoError(origin + ": malformed facet at index " + std::to_string(i));
        if (count != 3) throw IoError(origin + ": non-triangular facet at index " + std::to_string(i));
        std::array<int, 3> tri{};
        for (int k = 0; k < 3; ++k) {
            long idx = 0;
            if (!(ss >> idx)) throw IoError(origin + ": malformed facet at index " + std::to_string(i));
            if (idx < 0 || idx >= nv)
                throw IoError(origin + ": facet " + std::to_string(i) +
                              " references missing vertex " + std::to_string(idx));
            tri[static_cast<size_t>(k)] = static_cast<int>(idx);
        }
        buffers.triangles.push_back(tri);
    }
    return buffers;
}

MeshBuffers parse_obj(std::istream& in, const std::string& origin) {
    MeshBuffers buffers;
    std::string line;
    size_t line_no = 0;
    size_t facet_index = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ss >> p.x >> p.y >> p.z))
                throw IoError(origin + ": malformed vertex on line " + std::to_string(line_no));
            buffers.positions.push_back(p);
        } else if (tag == "f") {
            std::vector<std::string> tokens;
            std::string token;
            while (ss >> token) tokens.push_back(token);
            if (tokens.size() != 3)
                throw IoError(origin + ": non-triangular facet at index " +
                              std::to_string(facet_index));
            std::array<int, 3> tri{};
            for (int k = 0; k < 3; ++k) {
                int idx = parse_index(tokens[static_cast<size_t>(k)], origin, line_no);
                // Negative indices count back from the current vertex list.
                long resolved = idx < 0 ? static_cast<long>(buffers.positions.size()) + idx
                                        : static_cast<long>(idx) - 1;
                if (resolved < 0 || resolved >= static_cast<long>(buffers.positions.size()))
                    throw IoError(origin + ": facet " + std::to_string(facet_index) +
                                  " references missing vertex " + std::to_string(idx));
                tri[static_cast<size_t>(k)] = static_cast<int>(resolved);
            }
            buffers.triangles.push_back(tri);
            ++facet_index;
        }
        // vn/vt/usemtl/o/g/s lines carry no geometry we keep.
    }
    return buffers;
}

void write_off(std::ostream& out, const MeshBuffers& buffers) {
    out << "OFF\n"
        << buffers.positions.size() << ' ' << buffers.triangles.size() << " 0\n";
    for (const Vec3& p : buffers.positions)
        out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z)
            << '\n';
    for (const auto& t : buffers.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_obj(std::ostream& out, const MeshBuffers& buffers) {
    for (const Vec3& p : buffers.positions)
        out << "v " << format_double(p.x) << ' ' << format_double(p.y) << ' '
            << format_double(p.z) << '\n';
    for (const auto& t : buffers.triangles)
        out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

MeshBuffers load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::string ext = lower_extension(path);
    if (ext == "off") return parse_off(in, path);
    if (ext == "obj") return parse_obj(in, path);
    throw IoError(path + ": unsupported mesh format '" + ext + "' (expected .off or .obj)");
}

void save_mesh(const std::string& path, const MeshBuffers& buffers) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    std::string ext = lower_extension(path);
    if (ext == "off")
        write_off(out, buffers);
    else if (ext == "obj")
        write_obj(out, buffers);
    else
        throw IoError(path + ": unsupported mesh format '" + ext + "' (expected .off or .obj)");
    if (!out) throw IoError(path + ": write failed");
}

}  // namespace minangle
