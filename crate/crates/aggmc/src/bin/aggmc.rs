fn main() {
    aggmc::cli::main_entry();
}
