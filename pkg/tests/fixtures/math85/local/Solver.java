public class Solver {

    private double shift;

    public Solver(double shift) {
        this.shift = shift;
    }

    public double value(double x) {
        return x * x - shift;
    }
}
