fn main() {
    std::process::exit(freebridge::cli::main_entry());
}
