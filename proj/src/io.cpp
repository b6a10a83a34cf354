#include "impstop/io.hpp"

#include <sstream>   // std::ostringstream
#include <stdexcept> // std::runtime_error

#include <fmt/format.h>

namespace impstop {

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

CsvWriter::CsvWriter(const std::string &path,
		const std::vector<std::string> &header)
		: out_(path, std::ios::binary) {
	if (!out_)
		throw std::runtime_error("cannot write " + path);
	row(header);
}

void CsvWriter::row(const std::vector<std::string> &cells) {
	for (std::size_t i = 0; i < cells.size(); ++i)
		out_ << (i ? "," : "") << cells[i];
	out_ << '\n';
}

void CsvWriter::row(const std::vector<double> &cells) {
	for (std::size_t i = 0; i < cells.size(); ++i)
		out_ << (i ? "," : "") << format_double(cells[i]);
	out_ << '\n';
}

void write_text(const std::string &path, const std::string &text) {
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw std::runtime_error("cannot write " + path);
	out << text;
}

std::string read_text(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw std::runtime_error("cannot read " + path);
	std::ostringstream buffer;
	buffer << in.rdbuf();
	return buffer.str();
}

} // namespace impstop
